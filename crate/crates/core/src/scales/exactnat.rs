//! Exact natural numbers with a symbolic exponent-tower extension.
//!
//! Scale endpoints grow like `N_{K+1} = (2^{M_K} + 1) · M_K`, so from the
//! fourth scale on no literal representation exists. [`ExactNat`] keeps a
//! value either as an arbitrary-precision literal or as an expression over
//! the closed grammar `{Pow2, Sum, Prod, literal}` — exactly the operations
//! the recurrence needs.
//!
//! Comparison is total and exact. It proceeds in tiers: saturating
//! bit-length bounds, literal evaluation when both sides fit a working
//! budget, and finally a sparse base-2 normal form (sums of `coeff · 2^exp`
//! terms with recursively compared exponents) reduced by head cancellation.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result};

/// Expressions smaller than this many bits are folded to literals on
/// construction; keeps scales 0..=2 literal while scale 3 stays symbolic.
const FOLD_BITS: u64 = 4096;

/// Working budget (in bits) for exact evaluation inside comparisons.
/// Distinct from the user-facing decimal materialization cap: this bounds
/// the intermediate values the comparator is willing to build.
const CMP_EVAL_BITS: u64 = 24_000_000;

/// Iteration guard for the normal-form comparison loop.
const CMP_STEP_LIMIT: usize = 100_000;

/// An exactly represented natural number: literal or tower expression.
#[derive(Clone, Debug)]
pub enum ExactNat {
    Lit(BigUint),
    Pow2(Box<ExactNat>),
    Sum(Box<ExactNat>, Box<ExactNat>),
    Prod(Box<ExactNat>, Box<ExactNat>),
}

impl ExactNat {
    pub fn zero() -> Self {
        ExactNat::Lit(BigUint::zero())
    }

    pub fn one() -> Self {
        ExactNat::Lit(BigUint::one())
    }

    pub fn from_u64(v: u64) -> Self {
        ExactNat::Lit(BigUint::from(v))
    }

    pub fn from_biguint(v: BigUint) -> Self {
        ExactNat::Lit(v)
    }

    /// `2^e`, folded to a literal for small exponents.
    pub fn pow2(e: ExactNat) -> Self {
        if let ExactNat::Lit(n) = &e {
            if let Some(k) = n.to_u64() {
                if k < FOLD_BITS {
                    return ExactNat::Lit(BigUint::one() << k);
                }
            }
        }
        ExactNat::Pow2(Box::new(e))
    }

    /// `a + b`, folded when both operands are small literals.
    pub fn add(a: ExactNat, b: ExactNat) -> Self {
        match (&a, &b) {
            (ExactNat::Lit(x), _) if x.is_zero() => return b,
            (_, ExactNat::Lit(y)) if y.is_zero() => return a,
            (ExactNat::Lit(x), ExactNat::Lit(y))
                if x.bits() <= FOLD_BITS && y.bits() <= FOLD_BITS =>
            {
                return ExactNat::Lit(x + y);
            }
            _ => {}
        }
        ExactNat::Sum(Box::new(a), Box::new(b))
    }

    /// `a * b`, folded when both operands are small literals.
    pub fn mul(a: ExactNat, b: ExactNat) -> Self {
        match (&a, &b) {
            (ExactNat::Lit(x), _) if x.is_zero() => return ExactNat::zero(),
            (_, ExactNat::Lit(y)) if y.is_zero() => return ExactNat::zero(),
            (ExactNat::Lit(x), _) if x.is_one() => return b,
            (_, ExactNat::Lit(y)) if y.is_one() => return a,
            (ExactNat::Lit(x), ExactNat::Lit(y))
                if x.bits() <= FOLD_BITS && y.bits() <= FOLD_BITS =>
            {
                return ExactNat::Lit(x * y);
            }
            _ => {}
        }
        ExactNat::Prod(Box::new(a), Box::new(b))
    }

    pub fn is_zero_value(&self) -> bool {
        self.cmp_nat(&ExactNat::zero()) == Ordering::Equal
    }

    /// Rigorous saturating bounds on the value, clamped to `u64`.
    /// A saturated bound reads "at least `u64::MAX`".
    fn value_bounds(&self) -> (u64, u64) {
        match self {
            ExactNat::Lit(n) => {
                let v = n.to_u64().unwrap_or(u64::MAX);
                (v, v)
            }
            ExactNat::Pow2(e) => {
                let (lo, hi) = e.value_bounds();
                let pl = if lo >= 64 { u64::MAX } else { 1u64 << lo };
                let ph = if hi >= 64 { u64::MAX } else { 1u64 << hi };
                (pl, ph)
            }
            ExactNat::Sum(a, b) => {
                let (al, ah) = a.value_bounds();
                let (bl, bh) = b.value_bounds();
                (al.saturating_add(bl), ah.saturating_add(bh))
            }
            ExactNat::Prod(a, b) => {
                let (al, ah) = a.value_bounds();
                let (bl, bh) = b.value_bounds();
                (al.saturating_mul(bl), ah.saturating_mul(bh))
            }
        }
    }

    /// Rigorous saturating bounds on the bit length (`bitlen(0) = 0`).
    pub fn bit_bounds(&self) -> (u64, u64) {
        match self {
            ExactNat::Lit(n) => (n.bits(), n.bits()),
            ExactNat::Pow2(e) => {
                let (lo, hi) = e.value_bounds();
                (lo.saturating_add(1), hi.saturating_add(1))
            }
            ExactNat::Sum(a, b) => {
                let (al, ah) = a.bit_bounds();
                let (bl, bh) = b.bit_bounds();
                (al.max(bl), ah.max(bh).saturating_add(1))
            }
            ExactNat::Prod(a, b) => {
                let (al, ah) = a.bit_bounds();
                let (bl, bh) = b.bit_bounds();
                let lo = if al == 0 || bl == 0 {
                    0
                } else {
                    al.saturating_add(bl).saturating_sub(1)
                };
                let hi = if ah == 0 || bh == 0 { 0 } else { ah.saturating_add(bh) };
                (lo, hi)
            }
        }
    }

    /// Evaluate to a literal if the result provably stays within
    /// `limit_bits`; `None` otherwise.
    pub fn eval_guarded(&self, limit_bits: u64) -> Option<BigUint> {
        let (_, hi) = self.bit_bounds();
        if hi > limit_bits {
            return None;
        }
        Some(self.eval_unchecked())
    }

    /// Bottom-up evaluation. Subexpressions never exceed the whole value
    /// (the grammar has no subtraction), so a prior bound on the root
    /// bounds every intermediate.
    fn eval_unchecked(&self) -> BigUint {
        match self {
            ExactNat::Lit(n) => n.clone(),
            ExactNat::Pow2(e) => {
                let k = e.eval_unchecked().to_u64().expect("guarded exponent");
                BigUint::one() << k
            }
            ExactNat::Sum(a, b) => a.eval_unchecked() + b.eval_unchecked(),
            ExactNat::Prod(a, b) => {
                // A provably-zero factor must short-circuit: the other
                // factor may be far beyond any evaluation budget.
                if a.bit_bounds().1 == 0 || b.bit_bounds().1 == 0 {
                    return BigUint::zero();
                }
                a.eval_unchecked() * b.eval_unchecked()
            }
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.eval_guarded(64).and_then(|n| n.to_u64())
    }

    /// Literal value, provided it fits within `cap_digits` decimal digits.
    pub fn eval_within_digits(&self, cap_digits: u64) -> Option<BigUint> {
        if !self.materializes(cap_digits) {
            return None;
        }
        let bits_cap = bits_upper_for_digits(cap_digits).saturating_add(8);
        Some(
            self.eval_guarded(bits_cap)
                .expect("materializes() implies evaluable"),
        )
    }

    /// Decimal materialization. Succeeds iff the value has at most
    /// `cap_digits` decimal digits; otherwise reports digit-count bounds.
    pub fn to_decimal(&self, cap_digits: u64) -> Result<String> {
        if let Some(v) = self.eval_within_digits(cap_digits) {
            Ok(v.to_string())
        } else {
            let (lo, hi) = self.bit_bounds();
            Err(Error::SizeBounds {
                digits_lo: digits_lower_for_bits(lo),
                digits_hi: digits_upper_for_bits(hi),
            })
        }
    }

    /// Whether the value has at most `cap_digits` decimal digits.
    pub fn materializes(&self, cap_digits: u64) -> bool {
        let (lo, hi) = self.bit_bounds();
        // Fast accept/reject on bit bounds; exact boundary via 10^cap.
        if hi <= bits_lower_for_digits(cap_digits) {
            return true;
        }
        if lo > bits_upper_for_digits(cap_digits) {
            return false;
        }
        let bound = ExactNat::Lit(BigUint::from(10u32).pow(
            u32::try_from(cap_digits).unwrap_or(u32::MAX),
        ));
        self.cmp_nat(&bound) == Ordering::Less // value < 10^cap  <=>  digits <= cap
    }

    /// Total exact comparison agreeing with numeric order.
    pub fn cmp_nat(&self, other: &ExactNat) -> Ordering {
        // Tier 0: both literal.
        if let (ExactNat::Lit(a), ExactNat::Lit(b)) = (self, other) {
            return a.cmp(b);
        }
        // Tier 1: separated bit-length bounds.
        let (alo, ahi) = self.bit_bounds();
        let (blo, bhi) = other.bit_bounds();
        if ahi < blo {
            return Ordering::Less;
        }
        if alo > bhi {
            return Ordering::Greater;
        }
        // Tier 2: moderate sizes evaluate exactly.
        if ahi <= FOLD_BITS && bhi <= FOLD_BITS {
            return self.eval_unchecked().cmp(&other.eval_unchecked());
        }
        // Tier 3: sparse normal-form comparison.
        cmp_nf(self.normal_form(), other.normal_form())
    }

    /// Sparse base-2 normal form: `Σ coeff_i · 2^{exp_i}` with positive
    /// odd coefficients and pairwise distinct exponents, sorted by
    /// descending exponent.
    fn normal_form(&self) -> Nf {
        match self {
            ExactNat::Lit(n) => {
                if n.is_zero() {
                    Nf { terms: Vec::new() }
                } else {
                    let tz = n.trailing_zeros().unwrap_or(0);
                    Nf {
                        terms: vec![Term {
                            coeff: n >> tz,
                            exp: ExactNat::from_u64(tz),
                        }],
                    }
                }
            }
            ExactNat::Pow2(e) => Nf {
                terms: vec![Term { coeff: BigUint::one(), exp: (**e).clone() }],
            },
            ExactNat::Sum(a, b) => {
                let mut nf = a.normal_form();
                for t in b.normal_form().terms {
                    nf.insert(t);
                }
                nf
            }
            ExactNat::Prod(a, b) => {
                let na = a.normal_form();
                let nb = b.normal_form();
                let mut out = Nf { terms: Vec::new() };
                for ta in &na.terms {
                    for tb in &nb.terms {
                        let coeff = &ta.coeff * &tb.coeff;
                        let tz = coeff.trailing_zeros().unwrap_or(0);
                        let exp = ExactNat::add(
                            ExactNat::add(ta.exp.clone(), tb.exp.clone()),
                            ExactNat::from_u64(tz),
                        );
                        out.insert(Term { coeff: coeff >> tz, exp });
                    }
                }
                out
            }
        }
    }
}

impl PartialEq for ExactNat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_nat(other) == Ordering::Equal
    }
}

impl Eq for ExactNat {}

impl PartialOrd for ExactNat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_nat(other))
    }
}

impl Ord for ExactNat {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_nat(other)
    }
}

#[derive(Clone, Debug)]
struct Term {
    coeff: BigUint, // positive, odd
    exp: ExactNat,
}

#[derive(Clone, Debug)]
struct Nf {
    terms: Vec<Term>, // descending by exponent, exponents pairwise distinct
}

impl Nf {
    /// Insert keeping order; merge on equal exponents and re-normalize the
    /// merged coefficient to odd.
    fn insert(&mut self, t: Term) {
        if t.coeff.is_zero() {
            return;
        }
        let mut lo = 0usize;
        let mut hi = self.terms.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            match t.exp.cmp_nat(&self.terms[mid].exp) {
                Ordering::Greater => hi = mid,
                Ordering::Less => lo = mid + 1,
                Ordering::Equal => {
                    let merged = &self.terms[mid].coeff + &t.coeff;
                    let tz = merged.trailing_zeros().unwrap_or(0);
                    let exp = ExactNat::add(
                        self.terms[mid].exp.clone(),
                        ExactNat::from_u64(tz),
                    );
                    self.terms.remove(mid);
                    self.insert(Term { coeff: merged >> tz, exp });
                    return;
                }
            }
        }
        self.terms.insert(lo, t);
    }

    fn pop_head(&mut self) -> Term {
        self.terms.remove(0)
    }

    /// Upper bound: `Σ coeff_i · 2^{e_max}` needs `bitlen(Σ coeff_i)` bits
    /// above the max exponent.
    fn coeff_sum_bits(&self) -> u64 {
        let mut s = BigUint::zero();
        for t in &self.terms {
            s += &t.coeff;
        }
        s.bits()
    }
}

/// Exact small difference `a - b` of two values known (by the caller) to
/// satisfy `a >= b`, if it can be extracted without unbounded work:
/// cancel structurally equal normal-form terms, then evaluate what is left.
fn diff_small(a: &ExactNat, b: &ExactNat) -> Option<BigUint> {
    if let (Some(x), Some(y)) = (a.eval_guarded(CMP_EVAL_BITS), b.eval_guarded(CMP_EVAL_BITS)) {
        return Some(x - y);
    }
    let mut na = a.normal_form();
    let mut nb = b.normal_form();
    // Cancel identical terms.
    let mut i = 0;
    'outer: while i < na.terms.len() {
        for j in 0..nb.terms.len() {
            if na.terms[i].coeff == nb.terms[j].coeff
                && na.terms[i].exp.cmp_nat(&nb.terms[j].exp) == Ordering::Equal
            {
                na.terms.remove(i);
                nb.terms.remove(j);
                continue 'outer;
            }
        }
        i += 1;
    }
    let va = nf_eval_guarded(&na, CMP_EVAL_BITS)?;
    let vb = nf_eval_guarded(&nb, CMP_EVAL_BITS)?;
    Some(va - vb)
}

fn nf_eval_guarded(nf: &Nf, limit_bits: u64) -> Option<BigUint> {
    let mut acc = BigUint::zero();
    for t in &nf.terms {
        let e = t.exp.eval_guarded(64)?.to_u64()?;
        if e.saturating_add(t.coeff.bits()) > limit_bits {
            return None;
        }
        acc += &t.coeff << e;
    }
    Some(acc)
}

/// Compare two normal forms by repeated head cancellation.
///
/// Invariant per iteration: the answer equals the comparison of the
/// remaining term lists. Heads with equal exponents subtract exactly;
/// heads separated by more than the opposing coefficient-sum width decide
/// immediately; heads at a small evaluable exponent offset are shifted to
/// a common exponent. Inputs needing anything beyond that (astronomically
/// close values with non-materializable structure mismatch) abort loudly
/// rather than risk a wrong order.
fn cmp_nf(mut a: Nf, mut b: Nf) -> Ordering {
    for _ in 0..CMP_STEP_LIMIT {
        match (a.terms.is_empty(), b.terms.is_empty()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            (false, false) => {}
        }
        match a.terms[0].exp.cmp_nat(&b.terms[0].exp) {
            Ordering::Equal => {
                let ta = a.pop_head();
                let tb = b.pop_head();
                match ta.coeff.cmp(&tb.coeff) {
                    Ordering::Equal => {}
                    Ordering::Greater => {
                        let d = &ta.coeff - &tb.coeff;
                        let tz = d.trailing_zeros().unwrap_or(0);
                        a.insert(Term {
                            coeff: d >> tz,
                            exp: ExactNat::add(ta.exp, ExactNat::from_u64(tz)),
                        });
                    }
                    Ordering::Less => {
                        let d = &tb.coeff - &ta.coeff;
                        let tz = d.trailing_zeros().unwrap_or(0);
                        b.insert(Term {
                            coeff: d >> tz,
                            exp: ExactNat::add(tb.exp, ExactNat::from_u64(tz)),
                        });
                    }
                }
            }
            Ordering::Greater => {
                // a's head alone may already dominate all of b.
                let sb = b.coeff_sum_bits();
                let sep = ExactNat::add(b.terms[0].exp.clone(), ExactNat::from_u64(sb));
                if a.terms[0].exp.cmp_nat(&sep) != Ordering::Less {
                    return Ordering::Greater;
                }
                shift_head_to(&mut a, &b.terms[0].exp);
            }
            Ordering::Less => {
                let sa = a.coeff_sum_bits();
                let sep = ExactNat::add(a.terms[0].exp.clone(), ExactNat::from_u64(sa));
                if b.terms[0].exp.cmp_nat(&sep) != Ordering::Less {
                    return Ordering::Less;
                }
                shift_head_to(&mut b, &a.terms[0].exp);
            }
        }
    }
    panic!("exact comparison exceeded the supported expression structure");
}

/// Rewrite the head term of `nf` at the (strictly smaller) exponent
/// `target`, multiplying the coefficient by the exponent gap.
fn shift_head_to(nf: &mut Nf, target: &ExactNat) {
    let head = nf.pop_head();
    let delta = diff_small(&head.exp, target)
        .and_then(|d| d.to_u64())
        .expect("exact comparison exceeded the supported expression structure");
    assert!(
        delta.saturating_add(head.coeff.bits()) <= CMP_EVAL_BITS,
        "exact comparison exceeded the supported expression structure"
    );
    nf.insert(Term { coeff: head.coeff << delta, exp: target.clone() });
}

// Directed integer bounds translating between bit and decimal-digit
// counts; log2(10) = 3.32192809488736234787...
const LOG2_10_LO: u128 = 3_321_928_094_887_362_347; // / 10^18, rounded down
const LOG2_10_HI: u128 = 3_321_928_094_887_362_348; // / 10^18, rounded up
const SCALE: u128 = 1_000_000_000_000_000_000;

/// Largest bit count certainly representable in `digits` decimal digits.
fn bits_lower_for_digits(digits: u64) -> u64 {
    ((digits as u128 * LOG2_10_LO) / SCALE) as u64
}

/// Bit count above which a value certainly needs more than `digits` digits.
fn bits_upper_for_digits(digits: u64) -> u64 {
    ((digits as u128 * LOG2_10_HI) / SCALE + 1) as u64
}

/// Lower bound on decimal digits of a value with `bits` bits.
fn digits_lower_for_bits(bits: u64) -> u64 {
    if bits == 0 {
        return 1;
    }
    (((bits as u128 - 1) * SCALE) / LOG2_10_HI) as u64 + 1
}

/// Upper bound on decimal digits of a value with `bits` bits.
fn digits_upper_for_bits(bits: u64) -> u64 {
    if bits == u64::MAX {
        return u64::MAX;
    }
    ((bits as u128 * SCALE) / LOG2_10_LO) as u64 + 1
}

impl fmt::Display for ExactNat {
    /// Expression rendering with explicit operand nesting, e.g.
    /// `(2^16+1)*16` or `2^((2^16+1)*16)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn prec(e: &ExactNat) -> u8 {
            match e {
                ExactNat::Lit(_) | ExactNat::Pow2(_) => 3,
                ExactNat::Prod(_, _) => 2,
                ExactNat::Sum(_, _) => 1,
            }
        }
        fn write_at(e: &ExactNat, ctx: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let p = prec(e);
            let paren = p < ctx;
            if paren {
                write!(f, "(")?;
            }
            match e {
                ExactNat::Lit(n) => write!(f, "{n}")?,
                ExactNat::Pow2(x) => {
                    write!(f, "2^")?;
                    // Exponent operand always tight: parens unless atomic.
                    write_at(x, 3, f)?;
                }
                ExactNat::Sum(a, b) => {
                    write_at(a, 1, f)?;
                    write!(f, "+")?;
                    write_at(b, 2, f)?;
                }
                ExactNat::Prod(a, b) => {
                    write_at(a, 2, f)?;
                    write!(f, "*")?;
                    write_at(b, 3, f)?;
                }
            }
            if paren {
                write!(f, ")")?;
            }
            Ok(())
        }
        write_at(self, 0, f)
    }
}

/// Parse the expression grammar: decimal literals, `2^E`, `E*F`, `E+F`,
/// parentheses. Whitespace is allowed between tokens.
pub fn parse_exactnat(text: &str) -> Result<ExactNat> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let value = parse_sum(bytes, &mut pos)?;
    skip_ws(bytes, &mut pos);
    if pos != bytes.len() {
        return Err(Error::Parse { pos, msg: "trailing input".into() });
    }
    Ok(value)
}

fn skip_ws(b: &[u8], pos: &mut usize) {
    while *pos < b.len() && b[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_sum(b: &[u8], pos: &mut usize) -> Result<ExactNat> {
    let mut acc = parse_prod(b, pos)?;
    loop {
        skip_ws(b, pos);
        if *pos < b.len() && b[*pos] == b'+' {
            *pos += 1;
            let rhs = parse_prod(b, pos)?;
            acc = ExactNat::add(acc, rhs);
        } else {
            return Ok(acc);
        }
    }
}

fn parse_prod(b: &[u8], pos: &mut usize) -> Result<ExactNat> {
    let mut acc = parse_atom(b, pos)?;
    loop {
        skip_ws(b, pos);
        if *pos < b.len() && b[*pos] == b'*' {
            *pos += 1;
            let rhs = parse_atom(b, pos)?;
            acc = ExactNat::mul(acc, rhs);
        } else {
            return Ok(acc);
        }
    }
}

fn parse_atom(b: &[u8], pos: &mut usize) -> Result<ExactNat> {
    skip_ws(b, pos);
    if *pos >= b.len() {
        return Err(Error::Parse { pos: *pos, msg: "expected value".into() });
    }
    if b[*pos] == b'(' {
        *pos += 1;
        let inner = parse_sum(b, pos)?;
        skip_ws(b, pos);
        if *pos >= b.len() || b[*pos] != b')' {
            return Err(Error::Parse { pos: *pos, msg: "expected ')'".into() });
        }
        *pos += 1;
        return Ok(inner);
    }
    if b[*pos] == b'2' && *pos + 1 < b.len() && b[*pos + 1] == b'^' {
        *pos += 2;
        let e = parse_atom(b, pos)?;
        return Ok(ExactNat::pow2(e));
    }
    let start = *pos;
    while *pos < b.len() && b[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        return Err(Error::Parse { pos: start, msg: "expected digit".into() });
    }
    let digits = std::str::from_utf8(&b[start..*pos]).expect("ascii digits");
    let n: BigUint = digits.parse().map_err(|_| Error::Parse {
        pos: start,
        msg: "invalid number".into(),
    })?;
    Ok(ExactNat::Lit(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lit(v: u64) -> ExactNat {
        ExactNat::from_u64(v)
    }

    #[test]
    fn folding_keeps_small_values_literal() {
        let n2 = ExactNat::mul(
            ExactNat::add(ExactNat::pow2(lit(16)), lit(1)),
            lit(16),
        );
        assert!(matches!(n2, ExactNat::Lit(_)));
        assert_eq!(n2.to_u64(), Some(1_048_592));
    }

    #[test]
    fn large_pow_stays_symbolic() {
        let p = ExactNat::pow2(lit(4_194_452));
        assert!(matches!(p, ExactNat::Pow2(_)));
        assert_eq!(p.bit_bounds(), (4_194_453, 4_194_453));
    }

    #[test]
    fn cmp_spec_examples() {
        // (2^16+1)*16 vs 2^20: 1,048,592 > 1,048,576.
        let a = ExactNat::mul(ExactNat::add(ExactNat::pow2(lit(16)), lit(1)), lit(16));
        let b = ExactNat::pow2(lit(20));
        assert_eq!(a.cmp_nat(&b), Ordering::Greater);

        // 2^{M_2} vs (2^{M_2}+1)*M_2, strict factor > 1.
        let m2 = 4_194_452u64;
        let p = ExactNat::pow2(lit(m2));
        let n3 = ExactNat::mul(ExactNat::add(ExactNat::pow2(lit(m2)), lit(1)), lit(m2));
        assert_eq!(p.cmp_nat(&n3), Ordering::Less);
        assert_eq!(n3.cmp_nat(&p), Ordering::Greater);

        // Identity case.
        let n1 = lit(3);
        assert_eq!(n1.cmp_nat(&lit(3)), Ordering::Equal);
    }

    #[test]
    fn cmp_adjacent_towers() {
        let m2 = 4_194_452u64;
        let base = ExactNat::pow2(lit(m2));
        let succ = ExactNat::add(ExactNat::pow2(lit(m2)), lit(1));
        assert_eq!(base.cmp_nat(&succ), Ordering::Less);
        assert_eq!(succ.cmp_nat(&base), Ordering::Greater);
        assert_eq!(succ.cmp_nat(&succ), Ordering::Equal);

        // 2*2^e == 2^(e+1)
        let twice = ExactNat::mul(lit(2), ExactNat::pow2(lit(m2)));
        let shifted = ExactNat::pow2(lit(m2 + 1));
        assert_eq!(twice.cmp_nat(&shifted), Ordering::Equal);
    }

    #[test]
    fn cmp_deep_tower_level() {
        // Values with exponents that themselves do not materialize:
        // 2^(2^(2^70)) vs 2^(2^(2^70))·3 — only the coefficient differs.
        let tower = ExactNat::pow2(ExactNat::pow2(ExactNat::pow2(lit(70))));
        let thrice = ExactNat::mul(lit(3), tower.clone());
        assert_eq!(tower.cmp_nat(&thrice), Ordering::Less);
        // And the sum 2^t + 2^t equals 2·2^t.
        let doubled = ExactNat::add(tower.clone(), tower.clone());
        let twice = ExactNat::mul(lit(2), tower.clone());
        assert_eq!(doubled.cmp_nat(&twice), Ordering::Equal);
    }

    #[test]
    fn to_decimal_respects_cap() {
        let v = ExactNat::pow2(lit(10));
        assert_eq!(v.to_decimal(10).unwrap(), "1024");
        assert_eq!(v.to_decimal(4).unwrap(), "1024");
        let err = v.to_decimal(3).unwrap_err();
        match err {
            Error::SizeBounds { digits_lo, digits_hi } => {
                assert!(digits_lo <= 4 && 4 <= digits_hi);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn decimal_boundary_is_exact() {
        // 10^6 has exactly 7 digits; 10^6 - 1 has 6.
        let million = ExactNat::Lit(BigUint::from(1_000_000u64));
        assert!(million.to_decimal(7).is_ok());
        assert!(million.to_decimal(6).is_err());
        let below = ExactNat::Lit(BigUint::from(999_999u64));
        assert!(below.to_decimal(6).is_ok());
    }

    #[test]
    fn display_nesting() {
        let n2 = ExactNat::Prod(
            Box::new(ExactNat::Sum(
                Box::new(ExactNat::Pow2(Box::new(lit(16)))),
                Box::new(lit(1)),
            )),
            Box::new(lit(16)),
        );
        assert_eq!(n2.to_string(), "(2^16+1)*16");
        let nested = ExactNat::Pow2(Box::new(n2));
        assert_eq!(nested.to_string(), "2^((2^16+1)*16)");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["3", "(2^16+1)*16", "2^((2^16+1)*16)", "1+2*3", "2^2^3"] {
            let v = parse_exactnat(s).unwrap();
            let v2 = parse_exactnat(&v.to_string()).unwrap();
            assert_eq!(v.cmp_nat(&v2), Ordering::Equal, "string {s}");
        }
        assert!(parse_exactnat("2^").is_err());
        assert!(parse_exactnat("(1+2").is_err());
        assert!(parse_exactnat("5x").is_err());
    }

    /// Random expression over small leaves, together with its exact value.
    fn arb_expr() -> impl Strategy<Value = (ExactNat, BigUint)> {
        let leaf = (0u64..200).prop_map(|v| (lit(v), BigUint::from(v)));
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|((a, va), (b, vb))| {
                    (ExactNat::add(a, b), va + vb)
                }),
                (inner.clone(), inner.clone()).prop_map(|((a, va), (b, vb))| {
                    (ExactNat::mul(a, b), va * vb)
                }),
                inner.prop_map(|(_a, va)| {
                    let e = (&va % BigUint::from(600u32)).to_u64().unwrap();
                    (
                        ExactNat::pow2(lit(e)),
                        BigUint::one() << e,
                    )
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn cmp_matches_bigint_order((a, va) in arb_expr(), (b, vb) in arb_expr()) {
            prop_assert_eq!(a.cmp_nat(&b), va.cmp(&vb));
        }

        #[test]
        fn display_parse_value_identity((a, va) in arb_expr()) {
            let reparsed = parse_exactnat(&a.to_string()).unwrap();
            prop_assert_eq!(reparsed.cmp_nat(&ExactNat::Lit(va)), Ordering::Equal);
        }
    }
}
