//! Binomials, subset and permutation enumeration, and piecewise-linear
//! tradeoff curves over exact rationals.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{fmt_rational, Rational};

/// Default cap on `n!` for [`enumerate_permutations`].
pub const DEFAULT_PERM_CAP: u64 = 10_000;

/// Binomial coefficient, zero whenever `n < 0`, `k < 0` or `n < k`.
pub fn binom(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || n < k {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// [`binom`] narrowed to `u64`; panics on overflow.
pub fn binom_u64(n: i64, k: i64) -> u64 {
    binom(n, k).to_u64().expect("binomial does not fit in u64")
}

/// All `size`-subsets of `ground`, each listed in ground order, in
/// lexicographic order of those sequences.
pub fn lex_subsets(ground: &[usize], size: usize) -> Vec<Vec<usize>> {
    let n = ground.len();
    if size > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        out.push(idx.iter().map(|&i| ground[i]).collect());
        // advance the rightmost index that still has room
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - size + i {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Uniformly random permutation of `1..=n` (Fisher–Yates).
pub fn uniform_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        p.swap(i, j);
    }
    p
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Every permutation of `1..=n` in lexicographic order, refusing when
/// `n!` exceeds `cap`.
pub fn enumerate_permutations(n: usize, cap: u64) -> Result<Vec<Vec<usize>>> {
    let total = factorial(n as u64);
    if total > BigInt::from(cap) {
        return Err(Error::InstanceTooLarge {
            outcomes: total.to_string(),
            cap,
        });
    }
    let mut cur: Vec<usize> = (1..=n).collect();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    Ok(out)
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// A point of a memory-load tradeoff.
pub type Point = (Rational, Rational);

/// Piecewise-linear function of memory with strictly increasing corners.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradeoffCurve {
    corners: Vec<Point>,
}

impl TradeoffCurve {
    /// Builds a curve from corners that are already sorted by strictly
    /// increasing `M`; collinear interior corners are dropped.
    pub fn from_points(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("tradeoff curve needs at least one point"));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::params(
                "curve corners must have strictly increasing memory",
            ));
        }
        Ok(TradeoffCurve {
            corners: drop_collinear(points),
        })
    }

    pub fn corners(&self) -> &[Point] {
        &self.corners
    }

    pub fn domain(&self) -> (Rational, Rational) {
        (
            self.corners[0].0.clone(),
            self.corners[self.corners.len() - 1].0.clone(),
        )
    }

    pub fn contains(&self, m: &Rational) -> bool {
        let (lo, hi) = self.domain();
        *m >= lo && *m <= hi
    }

    /// Linear interpolation between neighbouring corners.
    pub fn eval(&self, m: &Rational) -> Result<Rational> {
        let (lo, hi) = self.domain();
        if *m < lo || *m > hi {
            return Err(Error::OutsideDomain {
                memory: fmt_rational(m),
                lo: fmt_rational(&lo),
                hi: fmt_rational(&hi),
            });
        }
        let i = self.corners.partition_point(|(x, _)| x < m);
        let (x1, y1) = &self.corners[i];
        if x1 == m {
            return Ok(y1.clone());
        }
        let (x0, y0) = &self.corners[i - 1];
        Ok(y0 + (y1 - y0) * (m - x0) / (x1 - x0))
    }

    pub fn scale(&self, factor: &Rational) -> TradeoffCurve {
        TradeoffCurve::from_points(
            self.corners
                .iter()
                .map(|(m, r)| (m.clone(), r * factor))
                .collect(),
        )
        .expect("scaling keeps the memory axis")
    }

    /// The same function restricted to `[lo, hi]` (clipped to the domain).
    pub fn restrict(&self, lo: &Rational, hi: &Rational) -> Result<TradeoffCurve> {
        let (dlo, dhi) = self.domain();
        let lo = lo.max(&dlo).clone();
        let hi = hi.min(&dhi).clone();
        if lo > hi {
            return Err(Error::params(
                "restriction interval misses the curve domain",
            ));
        }
        let mut pts = vec![(lo.clone(), self.eval(&lo)?)];
        pts.extend(
            self.corners
                .iter()
                .filter(|(m, _)| *m > lo && *m < hi)
                .cloned(),
        );
        if hi > lo {
            pts.push((hi.clone(), self.eval(&hi)?));
        }
        TradeoffCurve::from_points(pts)
    }

    /// Pointwise maximum on the common domain, with crossing points added.
    pub fn pointwise_max(&self, other: &TradeoffCurve) -> Result<TradeoffCurve> {
        self.combine(other, true)
    }

    pub fn pointwise_min(&self, other: &TradeoffCurve) -> Result<TradeoffCurve> {
        self.combine(other, false)
    }

    fn combine(&self, other: &TradeoffCurve, take_max: bool) -> Result<TradeoffCurve> {
        let (a0, a1) = self.domain();
        let (b0, b1) = other.domain();
        let lo = a0.max(b0);
        let hi = a1.min(b1);
        if lo > hi {
            return Err(Error::params("curves have disjoint domains"));
        }
        let mut xs: Vec<Rational> = self
            .corners
            .iter()
            .chain(other.corners.iter())
            .map(|(m, _)| m.clone())
            .filter(|m| *m >= lo && *m <= hi)
            .collect();
        xs.push(lo.clone());
        xs.push(hi.clone());
        xs.sort();
        xs.dedup();
        let mut all = xs.clone();
        for w in xs.windows(2) {
            let (d0, d1) = (
                self.eval(&w[0])? - other.eval(&w[0])?,
                self.eval(&w[1])? - other.eval(&w[1])?,
            );
            if (d0.is_positive() && d1.is_negative()) || (d0.is_negative() && d1.is_positive()) {
                // both are linear on the interval, so the difference is too
                let x = &w[0] + (&w[1] - &w[0]) * &d0 / (&d0 - &d1);
                all.push(x);
            }
        }
        all.sort();
        all.dedup();
        let pts = all
            .into_iter()
            .map(|m| {
                let (u, v) = (self.eval(&m)?, other.eval(&m)?);
                let r = if take_max { u.max(v) } else { u.min(v) };
                Ok((m, r))
            })
            .collect::<Result<Vec<_>>>()?;
        TradeoffCurve::from_points(pts)
    }
}

fn drop_collinear(points: Vec<Point>) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        while out.len() >= 2 {
            let (a, b) = (&out[out.len() - 2], &out[out.len() - 1]);
            if cross(a, b, &p).is_zero() {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

/// Twice the signed area of triangle `abc`; positive for a left turn.
fn cross(a: &Point, b: &Point, c: &Point) -> Rational {
    (&b.0 - &a.0) * (&c.1 - &a.1) - (&b.1 - &a.1) * (&c.0 - &a.0)
}

/// Lower boundary of the convex hull of `points` over `[min M, max M]`.
pub fn lower_convex_envelope(points: &[Point]) -> Result<TradeoffCurve> {
    if points.is_empty() {
        return Err(Error::EmptyInput("envelope needs at least one point"));
    }
    let mut pts = points.to_vec();
    pts.sort();
    // keep the lowest load at each memory value
    pts.dedup_by(|later, earlier| later.0 == earlier.0);
    let mut hull: Vec<Point> = Vec::new();
    for p in pts {
        while hull.len() >= 2
            && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &p).is_positive()
        {
            hull.pop();
        }
        hull.push(p);
    }
    TradeoffCurve::from_points(hull)
}

/// Upper envelope `max_i (slope_i * x + intercept_i)` over `[lo, hi]`.
pub fn max_of_lines(
    lines: &[(Rational, Rational)],
    lo: &Rational,
    hi: &Rational,
) -> Result<TradeoffCurve> {
    if lines.is_empty() {
        return Err(Error::EmptyInput("max of lines needs at least one line"));
    }
    if lo > hi {
        return Err(Error::params("empty interval"));
    }
    let at = |x: &Rational| {
        lines
            .iter()
            .map(|(s, c)| s * x + c)
            .max()
            .expect("nonempty")
    };
    let mut xs = vec![lo.clone(), hi.clone()];
    for (i, (s1, c1)) in lines.iter().enumerate() {
        for (s2, c2) in &lines[i + 1..] {
            if s1 != s2 {
                let x = (c2 - c1) / (s1 - s2);
                if x > *lo && x < *hi {
                    xs.push(x);
                }
            }
        }
    }
    xs.sort();
    xs.dedup();
    TradeoffCurve::from_points(
        xs.into_iter()
            .map(|x| {
                let y = at(&x);
                (x, y)
            })
            .collect(),
    )
}

/// `n + 1` evenly spaced rationals from `lo` to `hi` inclusive.
pub fn even_grid(lo: &Rational, hi: &Rational, n: usize) -> Vec<Rational> {
    if n == 0 {
        return vec![lo.clone()];
    }
    (0..=n)
        .map(|i| lo + (hi - lo) * Rational::new(BigInt::from(i), BigInt::from(n)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rat;
    use crate::rng::seeded_rng;
    use proptest::prelude::*;
    use std::collections::HashMap;

    #[test]
    fn binomial_convention() {
        assert_eq!(binom(4, 2), BigInt::from(6));
        assert_eq!(binom(2, 3), BigInt::zero());
        assert_eq!(binom(-1, 0), BigInt::zero());
        assert_eq!(binom(0, 0), BigInt::one());
        assert_eq!(binom(5, -1), BigInt::zero());
        assert_eq!(
            binom(60, 30),
            "118264581564861424".parse::<BigInt>().unwrap()
        );
    }

    #[test]
    fn small_subset_lists() {
        assert_eq!(
            lex_subsets(&[1, 2, 3], 2),
            vec![vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(
            lex_subsets(&[2, 3, 4, 5], 1),
            vec![vec![2], vec![3], vec![4], vec![5]]
        );
        assert_eq!(lex_subsets(&[1, 2, 3, 4], 0), vec![Vec::<usize>::new()]);
        assert_eq!(lex_subsets(&[1, 2], 2), vec![vec![1, 2]]);
        assert!(lex_subsets(&[1, 2], 3).is_empty());
        assert_eq!(lex_subsets(&[], 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn permutations_lexicographic_and_capped() {
        assert_eq!(
            enumerate_permutations(2, DEFAULT_PERM_CAP).unwrap(),
            vec![vec![1, 2], vec![2, 1]]
        );
        let p3 = enumerate_permutations(3, DEFAULT_PERM_CAP).unwrap();
        assert_eq!(p3.len(), 6);
        assert!(p3.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(
            enumerate_permutations(1, DEFAULT_PERM_CAP).unwrap(),
            vec![vec![1]]
        );
        assert!(matches!(
            enumerate_permutations(8, DEFAULT_PERM_CAP),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn shuffle_is_uniform_on_three() {
        let mut rng = seeded_rng(3, "perm-test");
        let mut counts: HashMap<Vec<usize>, u32> = HashMap::new();
        let n = 60_000u32;
        for _ in 0..n {
            *counts.entry(uniform_permutation(3, &mut rng)).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let p = 1.0 / 6.0;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for c in counts.values() {
            assert!((*c as f64 - n as f64 * p).abs() < 3.0 * sigma, "{counts:?}");
        }
        assert_eq!(uniform_permutation(1, &mut rng), vec![1]);
        assert_eq!(
            uniform_permutation(5, &mut seeded_rng(1, "x")),
            uniform_permutation(5, &mut seeded_rng(1, "x"))
        );
    }

    #[test]
    fn envelope_removes_point_above_chord() {
        let c = lower_convex_envelope(&[
            (rat(1, 1), rat(2, 1)),
            (rat(2, 1), rat(0, 1)),
            (rat(3, 2), rat(3, 1)),
        ])
        .unwrap();
        assert_eq!(
            c.corners(),
            &[(rat(1, 1), rat(2, 1)), (rat(2, 1), rat(0, 1))]
        );
    }

    #[test]
    fn envelope_memory_sharing_example() {
        // two points of the virtual-user scheme at K=2, N=3
        let c = lower_convex_envelope(&[(rat(2, 1), rat(1, 1)), (rat(5, 2), rat(1, 3))]).unwrap();
        assert_eq!(c.eval(&rat(9, 4)).unwrap(), rat(2, 3));
    }

    #[test]
    fn single_point_envelope_is_that_point() {
        let c = lower_convex_envelope(&[(rat(1, 2), rat(3, 1))]).unwrap();
        assert_eq!(c.eval(&rat(1, 2)).unwrap(), rat(3, 1));
        assert!(c.eval(&rat(1, 1)).is_err());
        assert!(lower_convex_envelope(&[]).is_err());
    }

    #[test]
    fn collinear_corners_merge() {
        let c = lower_convex_envelope(&[
            (rat(0, 1), rat(2, 1)),
            (rat(1, 1), rat(1, 1)),
            (rat(2, 1), rat(0, 1)),
        ])
        .unwrap();
        assert_eq!(c.corners().len(), 2);
    }

    #[test]
    fn max_and_min_insert_crossings() {
        let a = TradeoffCurve::from_points(vec![(rat(0, 1), rat(2, 1)), (rat(2, 1), rat(0, 1))])
            .unwrap();
        let b = TradeoffCurve::from_points(vec![(rat(0, 1), rat(0, 1)), (rat(2, 1), rat(2, 1))])
            .unwrap();
        let hi = a.pointwise_max(&b).unwrap();
        assert_eq!(
            hi.corners(),
            &[
                (rat(0, 1), rat(2, 1)),
                (rat(1, 1), rat(1, 1)),
                (rat(2, 1), rat(2, 1))
            ]
        );
        let lo = a.pointwise_min(&b).unwrap();
        assert_eq!(lo.eval(&rat(1, 1)).unwrap(), rat(1, 1));
        assert_eq!(lo.eval(&rat(0, 1)).unwrap(), rat(0, 1));
    }

    #[test]
    fn lines_upper_envelope() {
        let lines = vec![
            (rat(-1, 1), rat(2, 1)),
            (rat(1, 1), rat(0, 1)),
            (rat(0, 1), rat(-5, 1)),
        ];
        let c = max_of_lines(&lines, &rat(0, 1), &rat(3, 1)).unwrap();
        assert_eq!(
            c.corners(),
            &[
                (rat(0, 1), rat(2, 1)),
                (rat(1, 1), rat(1, 1)),
                (rat(3, 1), rat(3, 1))
            ]
        );
    }

    #[test]
    fn restrict_clips() {
        let a = TradeoffCurve::from_points(vec![(rat(0, 1), rat(4, 1)), (rat(4, 1), rat(0, 1))])
            .unwrap();
        let r = a.restrict(&rat(1, 1), &rat(10, 1)).unwrap();
        assert_eq!(r.domain(), (rat(1, 1), rat(4, 1)));
        assert_eq!(r.eval(&rat(1, 1)).unwrap(), rat(3, 1));
    }

    fn small_point() -> impl Strategy<Value = Point> {
        (0i64..20, 1i64..4, 0i64..30, 1i64..4).prop_map(|(a, b, c, d)| (rat(a, b), rat(c, d)))
    }

    proptest! {
        #[test]
        fn subset_count_matches_binomial(n in 0usize..=12, s in 0usize..=12) {
            prop_assume!(s <= n);
            let ground: Vec<usize> = (1..=n).collect();
            let subs = lex_subsets(&ground, s);
            prop_assert_eq!(subs.len() as u64, binom_u64(n as i64, s as i64));
            prop_assert!(subs.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn envelope_lies_below_inputs_and_is_convex(points in proptest::collection::vec(small_point(), 1..12)) {
            let c = lower_convex_envelope(&points).unwrap();
            for (m, r) in &points {
                prop_assert!(c.eval(m).unwrap() <= *r);
            }
            let slopes: Vec<Rational> = c.corners().windows(2)
                .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
                .collect();
            prop_assert!(slopes.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
