//! The symbolic dendrite model.
//!
//! Points are addresses over the naturals: the gluing point `o` is the
//! root, a finite address is a hub (ramification point), an infinite
//! address — finite prefix plus a deterministic tail generator — is an
//! end point. The subdendrite `E_j` consists of `o` and every point whose
//! first symbol is `j`; `U_j = E_j \ {o}`.
//!
//! The metric is a tree path metric with multiplicative budgets: the edge
//! from hub `w` to hub `w·a` weighs `budget(w) · 2^{-(a+2)}`, so subtrees
//! shrink both in depth and in branch index. That yields the
//! height–proximity bound `d(p, o) <= 2^{-j-1}` for first symbol `j`,
//! which the diagnostics lean on.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::{splitmix64_at, Error, Result};

/// Exact binary rational `num / 2^exp`, normalized (odd numerator or zero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    num: BigUint,
    exp: u64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { num: BigUint::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { num: BigUint::one(), exp: 0 }
    }

    pub fn from_u64(v: u64) -> Self {
        Dyadic { num: BigUint::from(v), exp: 0 }.normalized()
    }

    /// `2^{-e}`.
    pub fn pow2_neg(e: u64) -> Self {
        Dyadic { num: BigUint::one(), exp: e }
    }

    /// `num / 2^exp`, normalized.
    pub fn new(num: BigUint, exp: u64) -> Self {
        Dyadic { num, exp }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0).min(self.exp);
        if tz > 0 {
            self.num >>= tz;
            self.exp -= tz;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &BigUint {
        &self.num
    }

    pub fn exponent(&self) -> u64 {
        self.exp
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let exp = self.exp.max(other.exp);
        let a = &self.num << (exp - self.exp);
        let b = &other.num << (exp - other.exp);
        Dyadic { num: a + b, exp }.normalized()
    }

    /// `self - other` when `self >= other`.
    pub fn checked_sub(&self, other: &Dyadic) -> Option<Dyadic> {
        if self.cmp(other) == Ordering::Less {
            return None;
        }
        let exp = self.exp.max(other.exp);
        let a = &self.num << (exp - self.exp);
        let b = &other.num << (exp - other.exp);
        Some(Dyadic { num: a - b, exp }.normalized())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic {
            num: &self.num * &other.num,
            exp: self.exp.saturating_add(other.exp),
        }
        .normalized()
    }

    /// Exact rational parts `(numerator, 2^exp)`.
    pub fn to_ratio(&self) -> (BigUint, BigUint) {
        (self.num.clone(), BigUint::one() << self.exp)
    }

    /// Approximate value for rendering; exact decimals stay in `to_ratio`.
    pub fn to_f64(&self) -> f64 {
        let mut n = self.num.clone();
        let mut e = self.exp;
        while n.bits() > 52 {
            n >>= 1;
            e = e.saturating_sub(1);
        }
        let mantissa = n.to_string().parse::<f64>().unwrap_or(f64::MAX);
        mantissa / (2f64).powi(e.min(2048) as i32)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        let a = &self.num << (exp - self.exp);
        let b = &other.num << (exp - other.exp);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

/// Parse `"2^-5"`, `"13/2^7"`, or a plain natural as a dyadic.
pub fn parse_dyadic(text: &str) -> Result<Dyadic> {
    let err = |msg: &str| Error::Parse { pos: 0, msg: msg.into() };
    if let Some(rest) = text.strip_prefix("2^-") {
        let e: u64 = rest.parse().map_err(|_| err("invalid exponent"))?;
        return Ok(Dyadic::pow2_neg(e));
    }
    if let Some((n, d)) = text.split_once("/2^") {
        let num: BigUint = n.parse().map_err(|_| err("invalid numerator"))?;
        let e: u64 = d.parse().map_err(|_| err("invalid exponent"))?;
        return Ok(Dyadic::new(num, e));
    }
    let num: BigUint = text.parse().map_err(|_| err("invalid dyadic"))?;
    Ok(Dyadic::new(num, 0))
}

/// Deterministic tail generator kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenKind {
    Zeros,
    Cycle(Vec<u64>),
    Seeded(u64),
}

/// A tail generator with its cursor.
#[derive(Clone, Debug)]
pub struct Gen {
    kind: GenKind,
    pos: u64,
}

impl Gen {
    pub fn zeros() -> Self {
        Gen { kind: GenKind::Zeros, pos: 0 }
    }

    pub fn cycle(symbols: Vec<u64>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::Parse { pos: 0, msg: "cycle needs at least one symbol".into() });
        }
        Ok(Gen { kind: GenKind::Cycle(symbols), pos: 0 })
    }

    /// SplitMix64-driven symbols in `0..=3`.
    pub fn seeded(seed: u64) -> Self {
        Gen { kind: GenKind::Seeded(seed), pos: 0 }
    }

    pub fn at(&self, i: u64) -> u64 {
        let idx = self.pos.wrapping_add(i);
        match &self.kind {
            GenKind::Zeros => 0,
            GenKind::Cycle(v) => v[(idx % v.len() as u64) as usize],
            GenKind::Seeded(seed) => splitmix64_at(*seed, idx) % 4,
        }
    }

    pub fn advanced(&self, k: u64) -> Gen {
        Gen { kind: self.kind.clone(), pos: self.pos + k }
    }

    pub fn pos(&self) -> u64 {
        self.pos
    }

    pub fn kind(&self) -> &GenKind {
        &self.kind
    }

    /// Observational normal form: zeros forget their cursor, cycles
    /// rotate it away, seeded streams keep it.
    fn normalized(&self) -> Gen {
        match &self.kind {
            GenKind::Zeros => Gen::zeros(),
            GenKind::Cycle(v) => {
                let shift = (self.pos % v.len() as u64) as usize;
                let mut rotated = v[shift..].to_vec();
                rotated.extend_from_slice(&v[..shift]);
                Gen { kind: GenKind::Cycle(rotated), pos: 0 }
            }
            GenKind::Seeded(_) => self.clone(),
        }
    }
}

impl PartialEq for Gen {
    /// Observable identity: same generator class, same future output.
    fn eq(&self, other: &Self) -> bool {
        let a = self.normalized();
        let b = other.normalized();
        a.kind == b.kind && a.pos == b.pos
    }
}

impl Eq for Gen {}

/// What follows a point's finite prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tail {
    /// Nothing: the point is the ramification point at the prefix.
    Hub,
    /// An infinite symbol stream: the point is an end point.
    Stream(Gen),
}

/// A point of the model dendrite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Point {
    O,
    At { prefix: Vec<u64>, tail: Tail },
}

impl Point {
    pub fn o() -> Self {
        Point::O
    }

    pub fn hub(prefix: Vec<u64>) -> Result<Self> {
        Self::at(prefix, Tail::Hub)
    }

    pub fn at(prefix: Vec<u64>, tail: Tail) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::Precondition("At points need a non-empty prefix".into()));
        }
        Ok(Point::At { prefix, tail })
    }

    pub fn symbol_at(&self, i: u64) -> Option<u64> {
        match self {
            Point::O => None,
            Point::At { prefix, tail } => {
                if (i as usize) < prefix.len() {
                    Some(prefix[i as usize])
                } else {
                    match tail {
                        Tail::Hub => None,
                        Tail::Stream(g) => Some(g.at(i - prefix.len() as u64)),
                    }
                }
            }
        }
    }

    pub fn first_symbol(&self) -> Option<u64> {
        self.symbol_at(0)
    }

    pub fn is_o(&self) -> bool {
        matches!(self, Point::O)
    }

    pub fn is_hub(&self) -> bool {
        matches!(self, Point::O | Point::At { tail: Tail::Hub, .. })
    }

    pub fn is_end(&self) -> bool {
        matches!(self, Point::At { tail: Tail::Stream(_), .. })
    }

    /// Whether the address extends (or equals) `prefix`; `o` never does.
    pub fn extends_prefix(&self, prefix: &[u64]) -> bool {
        match self {
            Point::O => false,
            Point::At { .. } => (0..prefix.len() as u64)
                .all(|i| self.symbol_at(i) == Some(prefix[i as usize])),
        }
    }
}

/// Subdendrite membership record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub is_o: bool,
    /// `o` lies in every `E_j`; an `At` point lies in exactly one.
    pub e_member: EMembership,
    pub u_member: Option<u64>,
    pub is_hub: bool,
    pub is_end: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EMembership {
    Every,
    Single(u64),
}

pub fn classify(p: &Point) -> Classification {
    match p {
        Point::O => Classification {
            is_o: true,
            e_member: EMembership::Every,
            u_member: None,
            is_hub: true,
            is_end: false,
        },
        Point::At { .. } => {
            let j = p.first_symbol().expect("At points have symbols");
            Classification {
                is_o: false,
                e_member: EMembership::Single(j),
                u_member: Some(j),
                is_hub: p.is_hub(),
                is_end: p.is_end(),
            }
        }
    }
}

/// `budget([a_1..a_k]) = Π_i 2^{-(a_i + 2)}`; `budget([]) = 1`.
pub fn budget(prefix: &[u64]) -> Dyadic {
    let mut exp: u64 = 0;
    for &a in prefix {
        exp = exp.saturating_add(a.saturating_add(2));
    }
    Dyadic::pow2_neg(exp)
}

/// Tree path metric, truncated once the remaining subtree budget drops
/// below `2^{-(precision+2)}` per side. The result under-approximates:
/// `result <= d(x, y) < result + 2^{-precision}`.
pub fn distance(x: &Point, y: &Point, precision: u32) -> Dyadic {
    if x == y {
        return Dyadic::zero();
    }
    let p = precision as u64;
    // Walk the common prefix to the meet.
    let mut depth: u64 = 0;
    let mut budget_exp: u64 = 0; // budget(common prefix) = 2^{-budget_exp}
    loop {
        // Both subtrees below the meet together stay under 2^{-budget_exp}.
        if budget_exp >= p + 2 {
            return Dyadic::zero();
        }
        match (x.symbol_at(depth), y.symbol_at(depth)) {
            (Some(a), Some(b)) if a == b => {
                budget_exp = budget_exp.saturating_add(a + 2);
                depth += 1;
            }
            _ => break,
        }
    }
    branch_sum(x, depth, budget_exp, p).add(&branch_sum(y, depth, budget_exp, p))
}

/// Sum of edge weights from the hub at `from_depth` down along `p`'s
/// address, truncated under the tolerance `2^{-(prec+2)}`.
fn branch_sum(point: &Point, from_depth: u64, budget_exp: u64, prec: u64) -> Dyadic {
    let mut total = Dyadic::zero();
    let mut be = budget_exp;
    let mut d = from_depth;
    while let Some(a) = point.symbol_at(d) {
        // Everything from this node on sums below budget/3 < 2^{-(be+1)}.
        if be >= prec + 1 {
            break;
        }
        let edge_exp = be.saturating_add(a + 2);
        // A single far branch: edge plus its subtree stay under
        // (4/3)·2^{-edge_exp}.
        if edge_exp >= prec + 3 {
            break;
        }
        total = total.add(&Dyadic::pow2_neg(edge_exp));
        be = edge_exp;
        d += 1;
    }
    total
}

/// A finite approximation of the dendrite: all hubs with prefix length
/// at most `depth` over symbols `< branch_cap`, in breadth-first,
/// lexicographic order. Node 0 is `o`.
#[derive(Clone, Debug)]
pub struct TruncNode {
    pub id: usize,
    pub prefix: Vec<u64>,
    pub parent: Option<usize>,
    pub budget: Dyadic,
}

pub fn truncate(depth: u32, branch_cap: u64) -> Vec<TruncNode> {
    let mut nodes = vec![TruncNode {
        id: 0,
        prefix: Vec::new(),
        parent: None,
        budget: Dyadic::one(),
    }];
    let mut level_start = 0usize;
    for _ in 0..depth {
        let level_end = nodes.len();
        for parent_id in level_start..level_end {
            for a in 0..branch_cap {
                let mut prefix = nodes[parent_id].prefix.clone();
                prefix.push(a);
                let budget = budget(&prefix);
                let id = nodes.len();
                nodes.push(TruncNode { id, prefix, parent: Some(parent_id), budget });
            }
        }
        level_start = level_end;
    }
    nodes
}

/// Point literal grammar:
/// `"o"` | symbols joined by `"."` with an optional `":"` tail spec in
/// `{zeros, cycle(n1,n2,…), seed(u64)}`; a missing tail spec means a hub.
/// An advanced stream cursor prints (and parses) as an `@pos` suffix.
pub fn parse_point(text: &str) -> Result<Point> {
    if text == "o" {
        return Ok(Point::O);
    }
    let (addr_part, tail_part) = match text.split_once(':') {
        Some((a, t)) => (a, Some(t)),
        None => (text, None),
    };
    if addr_part.is_empty() {
        return Err(Error::Parse { pos: 0, msg: "empty address".into() });
    }
    let mut prefix = Vec::new();
    let mut offset = 0usize;
    for part in addr_part.split('.') {
        let sym: u64 = part.parse().map_err(|_| Error::Parse {
            pos: offset,
            msg: format!("invalid symbol {part:?}"),
        })?;
        prefix.push(sym);
        offset += part.len() + 1;
    }
    let tail = match tail_part {
        None => Tail::Hub,
        Some(spec) => Tail::Stream(parse_gen(spec, addr_part.len() + 1)?),
    };
    Point::at(prefix, tail)
}

fn parse_gen(spec: &str, base: usize) -> Result<Gen> {
    let (body, pos) = match spec.split_once('@') {
        Some((b, p)) => {
            let pos: u64 = p.parse().map_err(|_| Error::Parse {
                pos: base + b.len() + 1,
                msg: "invalid cursor".into(),
            })?;
            (b, pos)
        }
        None => (spec, 0),
    };
    let gen = if body == "zeros" {
        Gen::zeros()
    } else if let Some(args) = body.strip_prefix("cycle(").and_then(|s| s.strip_suffix(')')) {
        let mut symbols = Vec::new();
        for part in args.split(',') {
            let sym: u64 = part.trim().parse().map_err(|_| Error::Parse {
                pos: base,
                msg: format!("invalid cycle symbol {part:?}"),
            })?;
            symbols.push(sym);
        }
        Gen::cycle(symbols)?
    } else if let Some(arg) = body.strip_prefix("seed(").and_then(|s| s.strip_suffix(')')) {
        let seed: u64 = arg.trim().parse().map_err(|_| Error::Parse {
            pos: base,
            msg: "invalid seed".into(),
        })?;
        Gen::seeded(seed)
    } else {
        return Err(Error::Parse { pos: base, msg: format!("unknown tail spec {body:?}") });
    };
    Ok(gen.advanced(pos))
}

pub fn format_point(p: &Point) -> String {
    match p {
        Point::O => "o".to_string(),
        Point::At { prefix, tail } => {
            let addr = prefix
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(".");
            match tail {
                Tail::Hub => addr,
                Tail::Stream(g) => {
                    let g = g.normalized();
                    let body = match g.kind() {
                        GenKind::Zeros => "zeros".to_string(),
                        GenKind::Cycle(v) => format!(
                            "cycle({})",
                            v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
                        ),
                        GenKind::Seeded(s) => format!("seed({s})"),
                    };
                    if g.pos() > 0 {
                        format!("{addr}:{body}@{}", g.pos())
                    } else {
                        format!("{addr}:{body}")
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hub(prefix: &[u64]) -> Point {
        Point::hub(prefix.to_vec()).unwrap()
    }

    fn end(prefix: &[u64], gen: Gen) -> Point {
        Point::at(prefix.to_vec(), Tail::Stream(gen)).unwrap()
    }

    #[test]
    fn budget_examples() {
        assert_eq!(budget(&[]), Dyadic::one());
        assert_eq!(budget(&[0]), Dyadic::pow2_neg(2));
        assert_eq!(budget(&[3, 1]), Dyadic::pow2_neg(8));
    }

    #[test]
    fn dyadic_arithmetic() {
        let q = Dyadic::pow2_neg(2);
        let half = Dyadic::pow2_neg(1);
        assert_eq!(q.add(&q), half);
        assert_eq!(half.checked_sub(&q).unwrap(), q);
        assert!(q.checked_sub(&half).is_none());
        assert_eq!(q.mul(&half), Dyadic::pow2_neg(3));
        assert!(q < half);
        assert_eq!(parse_dyadic("2^-5").unwrap(), Dyadic::pow2_neg(5));
        assert_eq!(parse_dyadic("3/2^4").unwrap(), Dyadic::new(BigUint::from(3u32), 4));
        assert_eq!(parse_dyadic("2").unwrap(), Dyadic::from_u64(2));
    }

    #[test]
    fn distance_o_to_first_hub_exact() {
        let d = distance(&Point::O, &hub(&[0]), 40);
        assert_eq!(d, Dyadic::pow2_neg(2));
    }

    #[test]
    fn distance_identity_and_symmetry() {
        let e = end(&[0, 0], Gen::zeros());
        assert!(distance(&e, &e, 60).is_zero());
        let f = end(&[0, 0], Gen::cycle(vec![1]).unwrap());
        let d1 = distance(&e, &f, 60);
        let d2 = distance(&f, &e, 60);
        assert_eq!(d1, d2);
        assert!(!d1.is_zero());
    }

    #[test]
    fn height_proximity_bound() {
        // d(p, o) <= 2^{-j-1} for first symbol j; exact for j <= 60.
        for j in [0u64, 1, 2, 5, 17, 60] {
            let p = end(&[j, 0], Gen::zeros());
            let d = distance(&p, &Point::O, 80);
            assert!(
                d <= Dyadic::pow2_neg(j + 1),
                "height-proximity fails at j={j}: {d}"
            );
        }
    }

    #[test]
    fn distance_tail_geometric_series_oracle() {
        // End point with all-zero tail below [0]: exact distance to o is
        // sum_{i>=1} 4^{-i} = 1/3; at precision p the truncated walk must
        // sit within 2^{-p} below 1/3.
        let p = end(&[0], Gen::zeros());
        let prec = 40u32;
        let d = distance(&p, &Point::O, prec);
        // 1/3 = 0.0101...b; compare via 3*d <= 1 < 3*(d + 2^-prec).
        let three_d = d.mul(&Dyadic::from_u64(3));
        assert!(three_d <= Dyadic::one());
        let upper = d.add(&Dyadic::pow2_neg(prec as u64)).mul(&Dyadic::from_u64(3));
        assert!(upper > Dyadic::one());
    }

    #[test]
    fn branch_shrinking() {
        // diam C_[j] <= 2^{-j-1}: distance between any two points of the
        // cylinder stays under the bound, sampled at several depths.
        for j in [0u64, 3, 10] {
            let a = end(&[j], Gen::zeros());
            let b = end(&[j, 4, 4], Gen::cycle(vec![2, 3]).unwrap());
            let d = distance(&a, &b, 70);
            assert!(d <= Dyadic::pow2_neg(j + 1), "cylinder diameter at j={j}");
        }
    }

    #[test]
    fn metric_axioms_on_truncation() {
        // Exhaustive identity/symmetry at depth <= 2, branch < 4, plus
        // triangle inequality on all triples (hub distances are exact).
        let nodes = truncate(2, 4);
        let points: Vec<Point> = nodes
            .iter()
            .map(|n| {
                if n.prefix.is_empty() {
                    Point::O
                } else {
                    hub(&n.prefix)
                }
            })
            .collect();
        let n = points.len();
        let mut d = vec![vec![Dyadic::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                d[i][j] = distance(&points[i], &points[j], 80);
            }
        }
        for i in 0..n {
            assert!(d[i][i].is_zero());
            for j in 0..n {
                assert_eq!(d[i][j], d[j][i]);
                if i != j {
                    assert!(!d[i][j].is_zero());
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let via = d[i][k].add(&d[k][j]);
                    assert!(d[i][j] <= via, "triangle fails at ({i},{j},{k})");
                }
            }
        }
    }

    #[test]
    fn classify_examples() {
        let c = classify(&Point::O);
        assert!(c.is_o && c.e_member == EMembership::Every && c.u_member.is_none());
        let c = classify(&hub(&[5, 2]));
        assert_eq!(c.e_member, EMembership::Single(5));
        assert_eq!(c.u_member, Some(5));
        assert!(c.is_hub && !c.is_end);
        let c = classify(&end(&[0, 0], Gen::zeros()));
        assert_eq!(c.e_member, EMembership::Single(0));
        assert_eq!(c.u_member, Some(0));
        assert!(!c.is_hub && c.is_end);
    }

    #[test]
    fn truncation_counts() {
        assert_eq!(truncate(1, 6).len(), 7);
        assert_eq!(truncate(0, 5).len(), 1);
        assert_eq!(truncate(2, 3).len(), 13);
        assert_eq!(truncate(4, 6).len(), 1 + 6 + 36 + 216 + 1296);
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_point("o").unwrap(), Point::O);
        assert_eq!(parse_point("0.4").unwrap(), hub(&[0, 4]));
        let p = parse_point("0.0:cycle(1)").unwrap();
        assert_eq!(p, end(&[0, 0], Gen::cycle(vec![1]).unwrap()));
        assert!(parse_point("").is_err());
        assert!(parse_point("0.x").is_err());
        assert!(parse_point("0:cycle()").is_err());
        assert!(parse_point("0:wat").is_err());
    }

    #[test]
    fn advanced_cursor_round_trip() {
        let p = end(&[0, 0], Gen::seeded(7).advanced(5));
        let s = format_point(&p);
        assert_eq!(s, "0.0:seed(7)@5");
        assert_eq!(parse_point(&s).unwrap(), p);
        // Advanced cycles normalize to a rotation.
        let q = end(&[1], Gen::cycle(vec![1, 2]).unwrap().advanced(1));
        assert_eq!(format_point(&q), "1:cycle(2,1)");
        assert_eq!(parse_point("1:cycle(2,1)").unwrap(), q);
        // Zeros forget the cursor.
        let z = end(&[1], Gen::zeros().advanced(9));
        assert_eq!(format_point(&z), "1:zeros");
        assert_eq!(parse_point("1:zeros").unwrap(), z);
    }

    fn arb_point() -> impl Strategy<Value = Point> {
        let prefix = proptest::collection::vec(0u64..9, 1..4);
        let tail = prop_oneof![
            Just(Tail::Hub),
            Just(Tail::Stream(Gen::zeros())),
            proptest::collection::vec(0u64..9, 1..4)
                .prop_map(|v| Tail::Stream(Gen::cycle(v).unwrap())),
            (0u64..1000).prop_map(|s| Tail::Stream(Gen::seeded(s))),
        ];
        prop_oneof![
            Just(Point::O),
            (prefix, tail).prop_map(|(p, t)| Point::at(p, t).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(p in arb_point()) {
            let s = format_point(&p);
            prop_assert_eq!(parse_point(&s).unwrap(), p);
        }

        #[test]
        fn distance_symmetry_random(a in arb_point(), b in arb_point()) {
            prop_assert_eq!(distance(&a, &b, 50), distance(&b, &a, 50));
        }
    }
}
