//! Desk-scale laboratory for a proximal, zero-entropy self-map of a
//! symbolically coded dendrite.
//!
//! The crate is organized around six subsystems:
//!
//! * [`scales`] — the gap set `Z` built from the doubly-exponential
//!   recurrence `N_{K+1} = (2^{M_K} + 1) · M_K`, with exact tower numerals
//!   ([`scales::ExactNat`]) for endpoints too large to materialize.
//! * [`lattice`] — the mixed-radix visit-time lattice whose pairwise
//!   differences land in `Z + 1`.
//! * [`space`] — the branch-skeleton dendrite: the gluing point `o`, hub
//!   and end points, subdendrite membership, and an exact dyadic path metric.
//! * [`mapcore`] — the self-map `f_Z`, orbit iteration, constant-time
//!   excursion leaping, and mechanical verifiers for its structural laws.
//! * [`probe`] — return densities, Birkhoff averages, near-fixed-point
//!   occupation, itinerary complexity, and chaos-pair diagnostics.
//! * [`shell`] — configuration, deterministic JSON/CSV/SVG emission, and
//!   the `dlab` command-line interface.

pub mod lattice;
pub mod mapcore;
pub mod probe;
pub mod scales;
pub mod shell;
pub mod space;

use std::fmt;

/// Crate-wide error type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// An operation touched a scale whose row data exceeds the
    /// materialization cap (or lies beyond the built table).
    UnmaterializedScale { scale: u32 },
    /// `z_enumerate` index falls past the last materialized interval.
    IndexBeyondMaterialization { first_unmaterialized: u32 },
    /// Rank pair passed in the wrong order (`left >= right`).
    RankOrder { left: u64, right: u64 },
    /// A digit exceeded its per-level cap.
    DigitBound { level: u32, digit: u64, cap: u64 },
    /// Decimal materialization refused; bounds on the decimal digit count.
    SizeBounds { digits_lo: u64, digits_hi: u64 },
    /// A jump height does not fit the address symbol representation.
    HeightOverflow,
    /// Requested horizon is not covered by the built scale table.
    HorizonExceedsTable { k_max: u32 },
    /// Text input rejected at a byte offset.
    Parse { pos: usize, msg: String },
    /// A documented precondition was violated.
    Precondition(String),
    /// Invalid configuration value.
    Config(String),
    /// Filesystem failure in the shell layer.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnmaterializedScale { scale } => {
                write!(f, "scale {scale} is not materialized under the current cap")
            }
            Error::IndexBeyondMaterialization { first_unmaterialized } => write!(
                f,
                "enumeration index reaches scale {first_unmaterialized}, which is not materialized"
            ),
            Error::RankOrder { left, right } => {
                write!(f, "rank order violation: {left} >= {right}")
            }
            Error::DigitBound { level, digit, cap } => {
                write!(f, "digit {digit} at level {level} exceeds cap {cap}")
            }
            Error::SizeBounds { digits_lo, digits_hi } => write!(
                f,
                "value does not materialize: decimal digit count in [{digits_lo}, {digits_hi}]"
            ),
            Error::HeightOverflow => {
                write!(f, "jump height exceeds the address symbol range (use leap-level orbits)")
            }
            Error::HorizonExceedsTable { k_max } => {
                write!(f, "horizon exceeds M_K for the built table (K_max = {k_max})")
            }
            Error::Parse { pos, msg } => write!(f, "parse error at byte {pos}: {msg}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// SplitMix64 step; the crate's only randomness primitive.
///
/// All sampling is driven by explicit seeds so that every run is
/// reproducible bit-for-bit across platforms.
pub(crate) fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Value of an indexed SplitMix64 stream without mutable state.
pub(crate) fn splitmix64_at(seed: u64, index: u64) -> u64 {
    let mut s = seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    splitmix64(&mut s)
}
