//! Closed-form achievable loads and converse bounds over exact rationals,
//! and multiplicative gaps between curves.
//!
//! Converse values are lower bounds on the worst-case load under uncoded
//! placement. Every bound is clamped at zero.

use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::combinat::{
    binom, even_grid, lower_convex_envelope, max_of_lines, Point, TradeoffCurve,
};
use crate::error::{Error, Result};
use crate::model::{fmt_rational, rat, rat_int, Rational};
use crate::{scheme_a, scheme_b};

/// Which formula produced a bound value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    /// Two-user family indexed by `h`.
    TwoUserFamily(usize),
    /// Two-user line `K(1 - 3y/N)`.
    TwoUserSteep,
    /// Two-user line `K(1/2 - y/N)`.
    TwoUserShallow,
    /// K-user family indexed by `h`, with both prefactors.
    KUserFamily(usize),
    /// K-user steep line with the `floor(K/2)/ceil(K/2)` prefactor.
    KUserSteep,
    /// K-user shallow line with the `floor(K/2)/ceil(K/2)` prefactor.
    KUserShallow,
    SharedLinkNonPrivate,
    ScaledByFactor,
    /// Every formula was negative.
    Clamped,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::TwoUserFamily(h) => write!(f, "two-user-family(h={h})"),
            Provenance::TwoUserSteep => write!(f, "two-user-steep"),
            Provenance::TwoUserShallow => write!(f, "two-user-shallow"),
            Provenance::KUserFamily(h) => write!(f, "k-user-family(h={h})"),
            Provenance::KUserSteep => write!(f, "k-user-steep"),
            Provenance::KUserShallow => write!(f, "k-user-shallow"),
            Provenance::SharedLinkNonPrivate => write!(f, "shared-link-nonprivate"),
            Provenance::ScaledByFactor => write!(f, "scaled-by-factor"),
            Provenance::Clamped => write!(f, "clamped"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundPoint {
    pub m: Rational,
    pub r_lower: Rational,
    pub provenance: Provenance,
}

/// An affine function `intercept + slope * y` tagged with its origin.
#[derive(Debug, Clone)]
struct Line {
    provenance: Provenance,
    slope: Rational,
    intercept: Rational,
}

impl Line {
    fn at(&self, y: &Rational) -> Rational {
        &self.intercept + &self.slope * y
    }
}

/// The `h`-family expression for general `K`:
/// `N - 2y - (4y + (N-K/2)h)/(h+2)
///   + (h^2(N-K/2) - N(2N/K-3) + h(N+K/2)) / ((h+1)(h+2)) * 2y/N`.
pub fn family_rhs(users: usize, files: usize, y: &Rational, h: usize) -> Rational {
    let (a, b) = family_coeffs(users, files, h);
    a + b * y
}

/// `(intercept, slope)` of [`family_rhs`] as a function of `y`.
fn family_coeffs(users: usize, files: usize, h: usize) -> (Rational, Rational) {
    let n = rat_int(files as u64);
    let k = rat_int(users as u64);
    let h = rat_int(h as u64);
    let two = rat(2, 1);
    let n_minus = &n - &k / &two;
    let n_plus = &n + &k / &two;
    let intercept = &n - &n_minus * &h / (&h + &two);
    let mid = &h * &h * &n_minus - &n * (&two * &n / &k - rat(3, 1)) + &h * &n_plus;
    let slope =
        -&two - rat(4, 1) / (&h + &two) + mid / ((&h + rat(1, 1)) * (&h + &two)) * &two / &n;
    (intercept, slope)
}

fn two_user_lines(files: usize) -> Vec<Line> {
    let n = rat_int(files as u64);
    let mut lines = Vec::new();
    if files >= 3 {
        for h in 0..=files - 3 {
            let (intercept, slope) = family_coeffs(2, files, h);
            lines.push(Line {
                provenance: Provenance::TwoUserFamily(h),
                slope,
                intercept,
            });
        }
    }
    lines.push(Line {
        provenance: Provenance::TwoUserSteep,
        slope: rat(-6, 1) / &n,
        intercept: rat(2, 1),
    });
    lines.push(Line {
        provenance: Provenance::TwoUserShallow,
        slope: rat(-2, 1) / &n,
        intercept: rat(1, 1),
    });
    lines
}

fn best(lines: &[Line], y: &Rational) -> (Rational, Provenance) {
    let mut out = (Rational::zero(), Provenance::Clamped);
    for l in lines {
        let v = l.at(y);
        if v > out.0 {
            out = (v, l.provenance);
        }
    }
    out
}

fn check_range(m: &Rational, lo: &Rational, hi: &Rational) -> Result<()> {
    if m < lo || m > hi {
        return Err(Error::OutsideDomain {
            memory: fmt_rational(m),
            lo: fmt_rational(lo),
            hi: fmt_rational(hi),
        });
    }
    Ok(())
}

/// Two-user converse at memory `M` in `[N/2, N]`, with the winning formula.
pub fn converse_two_user_detail(files: usize, m: &Rational) -> Result<BoundPoint> {
    if files < 2 {
        return Err(Error::params("need N >= 2"));
    }
    let n = rat_int(files as u64);
    let half = &n / rat(2, 1);
    check_range(m, &half, &n)?;
    let y = m - &half;
    let (r, provenance) = best(&two_user_lines(files), &y);
    Ok(BoundPoint {
        m: m.clone(),
        r_lower: r,
        provenance,
    })
}

pub fn converse_two_user(files: usize, m: &Rational) -> Result<Rational> {
    converse_two_user_detail(files, m).map(|b| b.r_lower)
}

fn lines_in_m(lines: &[Line], offset: &Rational, scale: &Rational) -> Vec<(Rational, Rational)> {
    // y = scale * (M - offset)
    let mut out: Vec<(Rational, Rational)> = lines
        .iter()
        .map(|l| {
            let s = &l.slope * scale;
            (s.clone(), &l.intercept - s * offset)
        })
        .collect();
    out.push((Rational::zero(), Rational::zero()));
    out
}

/// The two-user converse as a curve, built from the line formulas.
pub fn converse_two_user_curve(files: usize) -> TradeoffCurve {
    let n = rat_int(files as u64);
    let half = &n / rat(2, 1);
    let lines = lines_in_m(&two_user_lines(files), &half, &rat(1, 1));
    max_of_lines(&lines, &half, &n).expect("nonempty lines")
}

/// The two-user converse as a curve, built from its closed-form corners.
pub fn converse_two_user_corners(files: usize) -> TradeoffCurve {
    let n = files as i64;
    let mut pts: Vec<Point> = vec![(rat(n, 2), rat(n, 1))];
    for hp in 1..=n - 2 {
        let m = rat(n, 2) + rat(n * hp, 2 * (n + 2 * hp - 2));
        let r = rat(
            (hp - 1) * (n + hp) + (n - 1) * n,
            (hp + 1) * (n + 2 * hp - 2),
        );
        pts.push((m, r));
    }
    pts.push((rat(3 * n, 4), rat(1, 2)));
    pts.push((rat(n, 1), rat(0, 1)));
    pts.sort();
    pts.dedup();
    TradeoffCurve::from_points(pts).expect("corners increase in memory")
}

fn k_user_prefactors(users: usize, files: usize) -> (Rational, Rational) {
    let a = rat((users / 2) as i64, users.div_ceil(2) as i64);
    let two_n_over_k = rat(2 * files as i64, users as i64);
    let floor = rat_int(two_n_over_k.floor().to_integer());
    (a, floor / two_n_over_k)
}

fn k_user_lines(users: usize, files: usize) -> Vec<Line> {
    let (a, b) = k_user_prefactors(users, files);
    let k = rat_int(users as u64);
    let n = rat_int(files as u64);
    let mut lines = Vec::new();
    // h ranges over [0, floor(2N/K - 3)], which is empty below 2N/K = 3
    let top = (rat(2 * files as i64, users as i64) - rat(3, 1))
        .floor()
        .to_integer();
    if !top.is_negative() {
        let top: usize = top.try_into().expect("small");
        for h in 0..=top {
            let (intercept, slope) = family_coeffs(users, files, h);
            lines.push(Line {
                provenance: Provenance::KUserFamily(h),
                slope: &slope * &a * &b,
                intercept: &intercept * &a * &b,
            });
        }
    }
    lines.push(Line {
        provenance: Provenance::KUserSteep,
        slope: -&a * &k * rat(3, 1) / &n,
        intercept: &a * &k,
    });
    lines.push(Line {
        provenance: Provenance::KUserShallow,
        slope: -&a * &k / &n,
        intercept: &a * &k / rat(2, 1),
    });
    lines
}

/// The K-user formulas evaluated at `y` for any `K >= 2`, without the
/// `N >= K >= 3` restriction. At `K = 2` both prefactors are one.
pub fn k_user_bound_value(users: usize, files: usize, y: &Rational) -> Rational {
    best(&k_user_lines(users, files), y).0
}

/// K-user converse with collusion at memory `M` in `[N/K, N]`. Beyond
/// `M = 2N/K` every formula is non-positive and the bound is zero.
pub fn converse_k_user_detail(users: usize, files: usize, m: &Rational) -> Result<BoundPoint> {
    if users < 3 || files < users {
        return Err(Error::Undefined(format!(
            "the K-user converse needs N >= K >= 3, got K={users}, N={files}"
        )));
    }
    let n = rat_int(files as u64);
    let k = rat_int(users as u64);
    check_range(m, &(&n / &k), &n)?;
    let y = (&k * m - &n) / rat(2, 1);
    if y > &n / rat(2, 1) {
        return Ok(BoundPoint {
            m: m.clone(),
            r_lower: Rational::zero(),
            provenance: Provenance::Clamped,
        });
    }
    let (r, provenance) = best(&k_user_lines(users, files), &y);
    Ok(BoundPoint {
        m: m.clone(),
        r_lower: r,
        provenance,
    })
}

pub fn converse_k_user(users: usize, files: usize, m: &Rational) -> Result<Rational> {
    converse_k_user_detail(users, files, m).map(|b| b.r_lower)
}

pub fn converse_k_user_curve(users: usize, files: usize) -> Result<TradeoffCurve> {
    if users < 3 || files < users {
        return Err(Error::Undefined(format!(
            "the K-user converse needs N >= K >= 3, got K={users}, N={files}"
        )));
    }
    let n = rat_int(files as u64);
    let k = rat_int(users as u64);
    let lo = &n / &k;
    let mid = rat(2, 1) * &n / &k;
    let lines = lines_in_m(&k_user_lines(users, files), &lo, &(&k / rat(2, 1)));
    let head = max_of_lines(&lines, &lo, &mid)?;
    let mut pts = head.corners().to_vec();
    if mid < n {
        pts.push((n, Rational::zero()));
    }
    TradeoffCurve::from_points(pts)
}

/// `t_2 = floor((2K - N + 1)/(N + 1))`.
pub fn shared_link_t2(users: usize, files: usize) -> i64 {
    let (k, n) = (users as i64, files as i64);
    Integer::div_floor(&(2 * k - n + 1), &(n + 1))
}

/// Envelope of `(Nt/K, (K-t)/(t+1))` for `t` in `[0, K]`, plus `(0, N)` when
/// `N < K`, with every load multiplied by `factor`.
pub fn shared_link_nonprivate_envelope(
    users: usize,
    files: usize,
    factor: &Rational,
) -> TradeoffCurve {
    let (k, n) = (users as i64, files as i64);
    let mut pts: Vec<Point> = (0..=k)
        .map(|t| (rat(n * t, k), rat(k - t, t + 1)))
        .collect();
    if files < users {
        pts.push((rat(0, 1), rat(n, 1)));
    }
    lower_convex_envelope(&pts).expect("nonempty").scale(factor)
}

/// The order-optimality factor that turns the non-private shared-link
/// envelope into a lower bound: `1/2` for `N >= K`, `1/4` for `N < K`.
pub fn shared_link_factor(users: usize, files: usize) -> Rational {
    if files >= users {
        rat(1, 2)
    } else {
        rat(1, 4)
    }
}

/// Exact shared-link load under uncoded placement with one message removed
/// per redundant group: `(binom(K,t+1) - binom(K-min(N,K),t+1)) / binom(K,t)`
/// at `M = Nt/K`.
pub fn shared_link_uncoded(users: usize, files: usize) -> TradeoffCurve {
    let (k, n) = (users as i64, files as i64);
    let ne = n.min(k);
    let pts: Vec<Point> = (0..=k)
        .map(|t| {
            (
                rat(n * t, k),
                Rational::new(binom(k, t + 1) - binom(k - ne, t + 1), binom(k, t)),
            )
        })
        .collect();
    lower_convex_envelope(&pts).expect("nonempty")
}

/// Low-memory anchor used with the coded-placement points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CAnchor {
    /// `(N/K, N)`, consistent with the other schemes.
    #[default]
    NOverK,
    /// `(K/N, N)`, the literal reading.
    KOverN,
}

/// `(t(N-1)/K + 1, (binom(K-1,t) - binom(K-1-N,t)) / binom(K-1,t-1))` for
/// `t` in `[1, K]`, preceded by the anchor point.
pub fn load_c_points(users: usize, files: usize, anchor: CAnchor) -> Vec<Point> {
    let (k, n) = (users as i64, files as i64);
    let first = match anchor {
        CAnchor::NOverK => (rat(n, k), rat(n, 1)),
        CAnchor::KOverN => (rat(k, n), rat(n, 1)),
    };
    let mut pts = vec![first];
    for t in 1..=k {
        pts.push((
            rat(t * (n - 1), k) + rat(1, 1),
            Rational::new(binom(k - 1, t) - binom(k - 1 - n, t), binom(k - 1, t - 1)),
        ));
    }
    pts
}

pub fn scheme_a_curve(users: usize, files: usize) -> TradeoffCurve {
    lower_convex_envelope(&scheme_a::load_a_points(users, files)).expect("nonempty")
}

pub fn scheme_b_curve(files: usize) -> TradeoffCurve {
    lower_convex_envelope(&scheme_b::load_b_points(files)).expect("nonempty")
}

pub fn scheme_c_curve(users: usize, files: usize, anchor: CAnchor) -> TradeoffCurve {
    lower_convex_envelope(&load_c_points(users, files, anchor)).expect("nonempty")
}

/// Envelope of `(N/K, N)` and `((N+t-1)/K, (U-t+1)/t)` for `t` in `[1, U+1]`.
pub fn scheme_a_upper_curve(users: usize, files: usize) -> TradeoffCurve {
    let u = (users - 1) * files;
    let mut pts: Vec<Point> = vec![(rat(files as i64, users as i64), rat(files as i64, 1))];
    for t in 1..=u + 1 {
        pts.push((
            rat((files + t - 1) as i64, users as i64),
            scheme_a::load_a_upper(users, files, t).expect("in range"),
        ));
    }
    lower_convex_envelope(&pts).expect("nonempty")
}

/// Checks that the upper-bound envelope of the virtual-user scheme stays
/// within three times `(K-t)/(t+1)` at every `M = Nt/K`, `t` in `[2, K]`.
pub fn upper_envelope_within_three(users: usize, files: usize) -> bool {
    let u = (users - 1) * files;
    let pts: Vec<Point> = (1..=u + 1)
        .map(|t1| {
            (
                rat((files + t1 - 1) as i64, users as i64),
                scheme_a::load_a_upper(users, files, t1).expect("in range"),
            )
        })
        .collect();
    let env = lower_convex_envelope(&pts).expect("nonempty");
    (2..=users).all(|t| {
        let m = rat((files * t) as i64, users as i64);
        let bound = rat(3 * (users - t) as i64, (t + 1) as i64);
        env.eval(&m).map(|r| r <= bound).unwrap_or(false)
    })
}

/// Memory intervals on which the two-user scheme meets the converse:
/// `[N/2, (N+1)/2]` and `[N(3N-5)/(2(2N-3)), N]`.
pub fn two_user_optimal_segments(files: usize) -> [(Rational, Rational); 2] {
    let n = files as i64;
    [
        (rat(n, 2), rat(n + 1, 2)),
        (rat(n * (3 * n - 5), 2 * (2 * n - 3)), rat(n, 1)),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapReport {
    pub max_ratio: Rational,
    pub argmax: Rational,
    /// Grid points dropped because the converse is zero there.
    pub skipped: Vec<Rational>,
}

/// Corner memories of both curves inside `[lo, hi]` plus `density` even steps.
pub fn default_grid(
    a: &TradeoffCurve,
    b: &TradeoffCurve,
    lo: &Rational,
    hi: &Rational,
    density: usize,
) -> Vec<Rational> {
    let mut g: Vec<Rational> = a
        .corners()
        .iter()
        .chain(b.corners())
        .map(|(m, _)| m.clone())
        .filter(|m| m >= lo && m <= hi)
        .collect();
    g.extend(even_grid(lo, hi, density));
    g.sort();
    g.dedup();
    g
}

/// Largest `achievable(M) / converse(M)` over `grid`.
pub fn gap(
    achievable: &TradeoffCurve,
    converse: &TradeoffCurve,
    grid: &[Rational],
) -> Result<GapReport> {
    let mut best: Option<(Rational, Rational)> = None;
    let mut skipped = Vec::new();
    for m in grid {
        let c = converse.eval(m)?;
        let a = achievable.eval(m)?;
        if !c.is_positive() {
            skipped.push(m.clone());
            continue;
        }
        let ratio = a / c;
        if best.as_ref().is_none_or(|(r, _)| ratio > *r) {
            best = Some((ratio, m.clone()));
        }
    }
    let (max_ratio, argmax) =
        best.ok_or(Error::EmptyInput("no grid point with a positive converse"))?;
    Ok(GapReport {
        max_ratio,
        argmax,
        skipped,
    })
}

/// Gap over the default grid on the common domain, starting at `m_min`
/// when given.
pub fn gap_on_default_grid(
    achievable: &TradeoffCurve,
    converse: &TradeoffCurve,
    m_min: Option<&Rational>,
    density: usize,
) -> Result<GapReport> {
    let (a0, a1) = achievable.domain();
    let (b0, b1) = converse.domain();
    let mut lo = a0.max(b0);
    if let Some(m) = m_min {
        lo = lo.max(m.clone());
    }
    let hi = a1.min(b1);
    if lo > hi {
        return Err(Error::params("curves share no memory range"));
    }
    gap(
        achievable,
        converse,
        &default_grid(achievable, converse, &lo, &hi, density),
    )
}
