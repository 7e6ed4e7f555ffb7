//! The visit-time lattice.
//!
//! A rank is a mixed-radix counter with digit bounds `L_K` (radix
//! `L_K + 1`) per scale, level 1 least significant. Its schedule value is
//! `val(r) = Σ a_K · c_K`. Because `c_K = N_K + 1 + D_{K-1}` dominates
//! everything below it, `val` is strictly monotone, and for any two ranks
//! `r < r'` with top differing level `T` the difference satisfies
//! `gap(r, r') − 1 ∈ [N_T, M_T − 1] ⊆ Z` — the Admissibility Lemma that
//! every orbit-return statement reduces to.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scales::{ExactNat, ScaleTable};
use crate::{Error, Result};

/// A point of the visit lattice, identified by its counter value.
///
/// Desk-scale work touches at most a handful of levels, so the counter is
/// kept in a machine word; levels past the materialization cap are
/// unusable anyway.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rank(pub u64);

/// Finitely supported digit sequence `(a_1, a_2, …)`, `a_K <= L_K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitVector(Vec<u64>);

impl DigitVector {
    pub fn new(digits: Vec<u64>) -> Self {
        let mut d = digits;
        while d.last() == Some(&0) {
            d.pop();
        }
        DigitVector(d)
    }

    /// Digit at level `K >= 1`.
    pub fn digit(&self, level: u32) -> u64 {
        self.0.get(level as usize - 1).copied().unwrap_or(0)
    }

    /// Highest level with a nonzero digit (0 for the zero vector).
    pub fn top_level(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn digits(&self) -> &[u64] {
        &self.0
    }
}

/// Mixed-radix digits of `r` with radices `L_K + 1`.
pub fn digits_of_rank(r: Rank, t: &ScaleTable) -> Result<DigitVector> {
    let top = t.usable_level_top();
    let mut v = r.0;
    let mut digits = Vec::new();
    let mut level = 1u32;
    while v > 0 {
        if level > top {
            return Err(Error::UnmaterializedScale { scale: top + 1 });
        }
        let radix = t.l(level)? + 1;
        digits.push(v % radix);
        v /= radix;
        level += 1;
    }
    Ok(DigitVector(digits))
}

/// Inverse of [`digits_of_rank`]; digits must respect their level caps.
pub fn rank_of_digits(dv: &DigitVector, t: &ScaleTable) -> Result<Rank> {
    let top = t.usable_level_top();
    if dv.top_level() > top {
        return Err(Error::UnmaterializedScale { scale: top + 1 });
    }
    let mut acc: u64 = 0;
    let mut place: u64 = 1;
    for (i, &a) in dv.0.iter().enumerate() {
        let level = i as u32 + 1;
        let cap = t.l(level)?;
        if a > cap {
            return Err(Error::DigitBound { level, digit: a, cap });
        }
        acc = acc
            .checked_add(a.checked_mul(place).ok_or(Error::HeightOverflow)?)
            .ok_or(Error::HeightOverflow)?;
        place = place.checked_mul(cap + 1).ok_or(Error::HeightOverflow)?;
    }
    Ok(Rank(acc))
}

/// Number of ranks supported by the usable levels (exclusive upper bound
/// on usable rank values).
pub fn rank_span(t: &ScaleTable) -> u64 {
    let mut span: u64 = 1;
    for level in 1..=t.usable_level_top() {
        let radix = t.l(level).expect("usable level has a row") + 1;
        span = span.saturating_mul(radix);
    }
    span
}

/// Schedule value `val(r) = Σ a_K · c_K`; strictly increasing in `r`.
pub fn val(r: Rank, t: &ScaleTable) -> Result<ExactNat> {
    let dv = digits_of_rank(r, t)?;
    let mut acc = ExactNat::zero();
    for (i, &a) in dv.0.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let level = i as u32 + 1;
        acc = ExactNat::add(
            acc,
            ExactNat::mul(ExactNat::from_u64(a), t.c(level)?.clone()),
        );
    }
    Ok(acc)
}

/// `val(r)` as a machine word, when every touched level has a word-sized
/// `c_K` (levels 1 and 2 under the default policy).
pub fn val_u64(r: Rank, t: &ScaleTable) -> Result<Option<u64>> {
    let dv = digits_of_rank(r, t)?;
    let mut acc: u64 = 0;
    for (i, &a) in dv.0.iter().enumerate() {
        if a == 0 {
            continue;
        }
        let level = i as u32 + 1;
        let c = match t.c(level)?.to_u64() {
            Some(c) => c,
            None => return Ok(None),
        };
        acc = match a.checked_mul(c).and_then(|x| acc.checked_add(x)) {
            Some(v) => v,
            None => return Ok(None),
        };
    }
    Ok(Some(acc))
}

/// `val(r') − val(r)` for `r < r'`, assembled without symbolic
/// subtraction: with top differing level `T` and signed low part
/// `δ = Σ_{K<T} (a'_K − a_K)·c_K`,
/// `gap = (Δa_T − 1)·c_T + N_T + (1 + D_{T−1} + δ)` and the trailing
/// parenthesis is a positive, materialized literal.
pub fn gap(r: Rank, r_next: Rank, t: &ScaleTable) -> Result<ExactNat> {
    let (term, n_t, low) = gap_parts(r, r_next, t)?;
    Ok(ExactNat::add(
        term,
        ExactNat::add(n_t, ExactNat::from_biguint(low)),
    ))
}

/// `gap(r, r') − 1`; the quantity the Admissibility Lemma places in
/// `[N_T, M_T − 1]`.
pub fn gap_minus_1(r: Rank, r_next: Rank, t: &ScaleTable) -> Result<ExactNat> {
    let (term, n_t, low) = gap_parts(r, r_next, t)?;
    Ok(ExactNat::add(
        term,
        ExactNat::add(n_t, ExactNat::from_biguint(low - BigUint::one())),
    ))
}

/// Common decomposition: returns `((Δa_T − 1)·c_T, N_T, 1 + D_{T−1} + δ)`.
fn gap_parts(r: Rank, r_next: Rank, t: &ScaleTable) -> Result<(ExactNat, ExactNat, BigUint)> {
    if r >= r_next {
        return Err(Error::RankOrder { left: r.0, right: r_next.0 });
    }
    let a = digits_of_rank(r, t)?;
    let b = digits_of_rank(r_next, t)?;
    let top = b.top_level().max(a.top_level());
    let mut t_level = 0u32;
    for level in (1..=top).rev() {
        if a.digit(level) != b.digit(level) {
            t_level = level;
            break;
        }
    }
    debug_assert!(t_level >= 1, "r < r' implies a differing digit");
    let delta_top = b.digit(t_level) - a.digit(t_level); // top digit grows with rank
    let cap = t.digit_cap();
    let d_prev = t
        .d(t_level - 1)?
        .eval_within_digits(cap)
        .ok_or(Error::UnmaterializedScale { scale: t_level })?;
    let mut low = BigInt::from(d_prev) + BigInt::one();
    for level in 1..t_level {
        let da = BigInt::from(b.digit(level)) - BigInt::from(a.digit(level));
        if da.is_zero() {
            continue;
        }
        let c = t
            .c(level)?
            .eval_within_digits(cap)
            .ok_or(Error::UnmaterializedScale { scale: level })?;
        low += da * BigInt::from(c);
    }
    debug_assert!(low.is_positive(), "|δ| <= D_(T-1) forces positivity");
    let low = low.to_biguint().expect("positive low part");
    let term = ExactNat::mul(
        ExactNat::from_u64(delta_top - 1),
        t.c(t_level)?.clone(),
    );
    Ok((term, t.n(t_level)?.clone(), low))
}

/// Witness scale for the Admissibility Lemma: the top differing digit
/// level `T`, which brackets `gap − 1` inside `[N_T, M_T − 1]`.
pub fn admissible(r: Rank, r_next: Rank, t: &ScaleTable) -> Result<u32> {
    if r >= r_next {
        return Err(Error::RankOrder { left: r.0, right: r_next.0 });
    }
    let a = digits_of_rank(r, t)?;
    let b = digits_of_rank(r_next, t)?;
    for level in (1..=b.top_level().max(a.top_level())).rev() {
        if a.digit(level) != b.digit(level) {
            return Ok(level);
        }
    }
    unreachable!("r < r' implies a differing digit")
}

/// Count of ranks `r` with `val(r) <= tmax`.
pub fn ranks_below(tmax: &ExactNat, t: &ScaleTable) -> Result<u64> {
    let cap = t.digit_cap();
    // Highest level with a materializable c_K; the greedy walk divides
    // by these literals.
    let mut greedy_top = 0u32;
    for level in 1..=t.usable_level_top() {
        if t.c(level)?.materializes(cap) {
            greedy_top = level;
        } else {
            break;
        }
    }
    // Range guard: tmax must sit below the first unusable c.
    let next_c = if greedy_top < t.k_max() && t.c(greedy_top + 1).is_ok() {
        t.c(greedy_top + 1)?.clone()
    } else {
        t.virtual_next(t.k_max())?.1
    };
    if tmax.cmp_nat(&next_c) != std::cmp::Ordering::Less {
        return Err(Error::UnmaterializedScale { scale: greedy_top + 1 });
    }
    let mut rem = tmax
        .eval_within_digits(cap)
        .ok_or(Error::UnmaterializedScale { scale: greedy_top + 1 })?;
    let mut digits = vec![0u64; greedy_top as usize];
    for level in (1..=greedy_top).rev() {
        let c = t
            .c(level)?
            .eval_within_digits(cap)
            .expect("greedy_top guarantees materialization");
        let q = (&rem / &c).to_u64().unwrap_or(u64::MAX);
        let a = q.min(t.l(level)?);
        if a > 0 {
            rem -= BigUint::from(a) * &c;
            digits[level as usize - 1] = a;
        }
    }
    let max_rank = rank_of_digits(&DigitVector::new(digits), t)?;
    Ok(max_rank.0 + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scales::{build_scale_table, DEFAULT_BETA, DEFAULT_DIGIT_CAP};
    use crate::splitmix64;
    use std::cmp::Ordering;

    fn table(k_max: u32) -> ScaleTable {
        build_scale_table(k_max, DEFAULT_BETA, DEFAULT_DIGIT_CAP).unwrap()
    }

    fn lit(v: u64) -> ExactNat {
        ExactNat::from_u64(v)
    }

    #[test]
    fn digit_round_trip_examples() {
        let t = table(2);
        assert_eq!(digits_of_rank(Rank(0), &t).unwrap().digits(), &[] as &[u64]);
        assert_eq!(digits_of_rank(Rank(4), &t).unwrap().digits(), &[4]);
        assert_eq!(digits_of_rank(Rank(7), &t).unwrap().digits(), &[2, 1]);
        for r in 0..25u64 {
            let dv = digits_of_rank(Rank(r), &t).unwrap();
            assert_eq!(rank_of_digits(&dv, &t).unwrap(), Rank(r));
        }
    }

    #[test]
    fn digit_cap_enforced() {
        let t = table(2);
        let bad = DigitVector::new(vec![5]);
        assert!(matches!(
            rank_of_digits(&bad, &t),
            Err(Error::DigitBound { level: 1, digit: 5, cap: 4 })
        ));
    }

    #[test]
    fn rank_beyond_levels_errors() {
        let t = table(2);
        // 25 = (0,0,1) touches level 3 on a two-level table.
        assert!(matches!(
            digits_of_rank(Rank(25), &t),
            Err(Error::UnmaterializedScale { scale: 3 })
        ));
        assert_eq!(rank_span(&t), 25);
    }

    #[test]
    fn val_examples() {
        let t = table(2);
        assert_eq!(val(Rank(0), &t).unwrap().to_u64(), Some(0));
        assert_eq!(val(Rank(4), &t).unwrap().to_u64(), Some(16));
        assert_eq!(val(Rank(5), &t).unwrap().to_u64(), Some(1_048_609));
        assert_eq!(val(Rank(6), &t).unwrap().to_u64(), Some(1_048_613));
        assert_eq!(val(Rank(24), &t).unwrap().to_u64(), Some(4_194_452));
        for r in 0..25u64 {
            assert_eq!(
                val_u64(Rank(r), &t).unwrap(),
                val(Rank(r), &t).unwrap().to_u64()
            );
        }
    }

    #[test]
    fn val_strictly_monotone() {
        let t = table(2);
        let mut prev = val(Rank(0), &t).unwrap();
        for r in 1..25u64 {
            let cur = val(Rank(r), &t).unwrap();
            assert_eq!(prev.cmp_nat(&cur), Ordering::Less, "rank {r}");
            prev = cur;
        }
    }

    #[test]
    fn gap_examples() {
        let t = table(2);
        assert_eq!(gap(Rank(0), Rank(1), &t).unwrap().to_u64(), Some(4));
        assert_eq!(
            gap(Rank(4), Rank(5), &t).unwrap().to_u64(),
            Some(1_048_593)
        );
        assert_eq!(
            gap(Rank(0), Rank(5), &t).unwrap().to_u64(),
            Some(1_048_609)
        );
        assert!(matches!(
            gap(Rank(3), Rank(3), &t),
            Err(Error::RankOrder { left: 3, right: 3 })
        ));
    }

    #[test]
    fn witness_examples() {
        let t = table(2);
        assert_eq!(admissible(Rank(0), Rank(1), &t).unwrap(), 1);
        assert_eq!(admissible(Rank(4), Rank(5), &t).unwrap(), 2);
        assert_eq!(admissible(Rank(0), Rank(24), &t).unwrap(), 2);
        // Boundary case: gap(0, 24) − 1 = M_2 − 1.
        assert_eq!(
            gap_minus_1(Rank(0), Rank(24), &t).unwrap().to_u64(),
            Some(4_194_451)
        );
    }

    /// Exhaustive Admissibility Lemma at levels 1–2: for all pairs
    /// r < r' <= 24, gap − 1 lands in [N_T, M_T − 1] at the witness T.
    #[test]
    fn admissibility_exhaustive_two_levels() {
        let t = table(2);
        let z = t.zset();
        for r in 0..24u64 {
            for rn in (r + 1)..=24 {
                let w = admissible(Rank(r), Rank(rn), &t).unwrap();
                let g1 = gap_minus_1(Rank(r), Rank(rn), &t).unwrap();
                assert!(
                    g1.cmp_nat(t.n(w).unwrap()) != Ordering::Less,
                    "({r},{rn}): gap-1 below N_{w}"
                );
                assert!(
                    g1.cmp_nat(t.m(w).unwrap()) == Ordering::Less,
                    "({r},{rn}): gap-1 reaches M_{w}"
                );
                assert_eq!(z.contains(&g1), Some(w), "({r},{rn})");
            }
        }
    }

    /// Randomized pairs touching level 3, checked by symbolic comparison
    /// against the expression-form scale-3 endpoints.
    #[test]
    fn admissibility_randomized_level_three() {
        let t = table(3);
        let span = rank_span(&t);
        assert_eq!(span, 125);
        let mut state = 0x5eed_1234u64;
        let mut touched_level3 = 0u32;
        for _ in 0..2_000 {
            let a = splitmix64(&mut state) % span;
            let b = splitmix64(&mut state) % span;
            if a == b {
                continue;
            }
            let (r, rn) = (Rank(a.min(b)), Rank(a.max(b)));
            let w = admissible(r, rn, &t).unwrap();
            if w == 3 {
                touched_level3 += 1;
            }
            let g1 = gap_minus_1(r, rn, &t).unwrap();
            assert!(g1.cmp_nat(t.n(w).unwrap()) != Ordering::Less);
            assert!(g1.cmp_nat(t.m(w).unwrap()) == Ordering::Less);
        }
        assert!(touched_level3 > 500, "sample should reach level 3");
    }

    #[test]
    fn gap_against_symbolic_val_difference() {
        // gap must agree with val computed independently: check
        // val(r) + gap(r, r') == val(r') symbolically, including level 3.
        let t = table(3);
        let mut state = 99u64;
        for _ in 0..200 {
            let a = splitmix64(&mut state) % 125;
            let b = splitmix64(&mut state) % 125;
            if a == b {
                continue;
            }
            let (r, rn) = (Rank(a.min(b)), Rank(a.max(b)));
            let lhs = ExactNat::add(val(r, &t).unwrap(), gap(r, rn, &t).unwrap());
            assert_eq!(lhs.cmp_nat(&val(rn, &t).unwrap()), Ordering::Equal);
        }
    }

    #[test]
    fn ranks_below_examples() {
        let t = table(2);
        assert_eq!(ranks_below(&lit(16), &t).unwrap(), 5);
        assert_eq!(ranks_below(&lit(0), &t).unwrap(), 1);
        assert_eq!(ranks_below(&lit(1_048_592), &t).unwrap(), 5);
        assert_eq!(ranks_below(&lit(1_048_609), &t).unwrap(), 6);
        assert_eq!(ranks_below(&lit(4_194_452), &t).unwrap(), 25);
        // Beyond the last usable c: named error.
        let t3 = table(3);
        let beyond = ExactNat::add(t3.c(3).unwrap().clone(), ExactNat::one());
        assert!(matches!(
            ranks_below(&beyond, &table(2)),
            Err(Error::UnmaterializedScale { scale: 3 })
        ));
    }

    #[test]
    fn ranks_below_matches_scan() {
        let t = table(2);
        for tmax in [0u64, 1, 3, 4, 15, 16, 17, 1_048_608, 1_048_609, 2_097_218] {
            let fast = ranks_below(&lit(tmax), &t).unwrap();
            let slow = (0..25u64)
                .filter(|&r| val_u64(Rank(r), &t).unwrap().unwrap() <= tmax)
                .count() as u64;
            assert_eq!(fast, slow, "tmax={tmax}");
        }
    }

    #[test]
    fn minimum_gap_is_c1() {
        let t = table(2);
        let mut min_gap: Option<u64> = None;
        for r in 0..24u64 {
            let g = gap(Rank(r), Rank(r + 1), &t).unwrap().to_u64().unwrap();
            min_gap = Some(min_gap.map_or(g, |m| m.min(g)));
        }
        assert_eq!(min_gap, Some(4));
    }
}
