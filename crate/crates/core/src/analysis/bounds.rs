use serde::Serialize;

use crate::attractor::{extreme_point, Side};
use crate::error::{Error, Hypothesis, Result};
use crate::numerics::{Interval, IntervalMap, Scalar};
use crate::systems::{validate, IfsSpec, MapSpec, SystemTable};
use crate::words::WordSpec;

/// Grid resolution for the sampled half of the `g_1`/`f_1` inequality checks.
const BOUND_GRID: i64 = 1024;

/// Quantities of the two-word separation estimates, in coordinates where the
/// common domain is `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompatibilityBounds {
    /// `inf |w'|` over both systems.
    pub lambda: Scalar,
    /// `min C(F)`.
    pub epsilon: Scalar,
    /// `f_1(0) - g_1(eps)`.
    pub beta0: Scalar,
    /// `2 / (lambda (b_0 - a_0)^2)`.
    pub gamma0: Scalar,
    /// Shortest stage-1 gap `(a_0, b_0)` of either system.
    pub min_gap: Interval,
    /// Index of `f_1`, the leftmost map of F.
    pub f_map: usize,
    /// Index of `g_1`, the map of G fixing 0.
    pub g_map: usize,
}

impl CompatibilityBounds {
    /// `beta_k = 2 beta_0 lambda^(k+1)`.
    pub fn beta(&self, k: u32) -> Scalar {
        Scalar::from_integer(2) * &self.beta0 * self.lambda.powi(k + 1)
    }

    /// `gamma_k = gamma_0 / 2^k`.
    pub fn gamma(&self, k: u32) -> Scalar {
        &self.gamma0 / &Scalar::from_integer(2).powi(k)
    }

    /// `(beta_0 lambda^k, 2^-k)`, the window for the difference of minima.
    pub fn raw_window(&self, k: u32) -> (Scalar, Scalar) {
        (
            &self.beta0 * &self.lambda.powi(k),
            Scalar::one() / Scalar::from_integer(2).powi(k),
        )
    }
}

fn violation(h: Hypothesis, detail: impl Into<String>) -> Error {
    Error::violation(h, detail)
}

/// `x >= 0`, allowing rounding noise for approximate values.
fn non_negative(x: &Scalar) -> bool {
    !x.is_negative() || x.abs().to_f64() <= 10.0 * x.error_bound()
}

fn coeffs(m: &MapSpec) -> (Scalar, Scalar, Scalar) {
    let c = m.kind().coeffs();
    let c2 = c.get(2).cloned().unwrap_or_else(Scalar::zero);
    (c[0].clone(), c[1].clone(), c2)
}

/// `g(x) < x/2` on `(0, 1]` for `g(0) = 0`: `g(x)/x - 1/2` is affine in `x`.
fn g_one_bound(g: &MapSpec) -> Result<()> {
    let half = Scalar::ratio(1, 2);
    let (_, c1, c2) = coeffs(g);
    let at0 = &c1 - &half;
    let at1 = &at0 + &c2;
    let exact_ok = at1.is_negative() && (at0.is_negative() || (at0.is_zero() && c2.is_negative()));
    if !exact_ok {
        return Err(violation(
            Hypothesis::GOneBound,
            format!("g_1(x)/x - 1/2 ranges over [{at0}, {at1}]"),
        ));
    }
    for i in 1..=BOUND_GRID {
        let x = Scalar::ratio(i, BOUND_GRID);
        if g.eval(&x) >= &half * &x {
            return Err(violation(Hypothesis::GOneBound, format!("fails at x = {x}")));
        }
    }
    Ok(())
}

/// `f(x) >= eps/2 + x/2` on `[0, eps]`.
fn f_one_bound(f: &MapSpec, eps: &Scalar) -> Result<()> {
    let half = Scalar::ratio(1, 2);
    let q = |x: &Scalar| f.eval(x) - &half * eps - &half * x;
    let (_, c1, c2) = coeffs(f);
    let mut candidates = vec![Scalar::zero(), eps.clone()];
    if c2.is_positive() {
        let vertex = -(&c1 - &half) / (Scalar::from_integer(2) * &c2);
        if !vertex.is_negative() && &vertex <= eps {
            candidates.push(vertex);
        }
    }
    for i in 0..=BOUND_GRID {
        candidates.push(eps * &Scalar::ratio(i, BOUND_GRID));
    }
    for x in &candidates {
        let v = q(x);
        if !non_negative(&v) {
            return Err(violation(
                Hypothesis::FOneBound,
                format!("f_1(x) - eps/2 - x/2 = {} at x = {x}", v.to_decimal_string(6)),
            ));
        }
    }
    Ok(())
}

/// Validity, half-derivative and symmetry checks shared by the bound and
/// discrimination computations.
pub(crate) fn check_pair(f_sys: &IfsSpec, g_sys: &IfsSpec) -> Result<()> {
    if f_sys.domain() != g_sys.domain() {
        return Err(violation(Hypothesis::CommonDomain, "F and G act on different intervals"));
    }
    for sys in [f_sys, g_sys] {
        let r = validate(sys);
        if !r.contraction_ok {
            return Err(violation(
                Hypothesis::Contraction,
                format!("{}: sup |f'| = {}", sys.name(), r.sup_derivative),
            ));
        }
        if !r.disjoint_ok {
            return Err(violation(Hypothesis::Disjointness, format!("{}", sys.name())));
        }
    }
    for sys in [f_sys, g_sys] {
        let r = validate(sys);
        if !r.half_derivative_ok {
            return Err(violation(
                Hypothesis::HalfDerivative,
                format!("{}: sup |f'| = {} is not below 1/2", sys.name(), r.sup_derivative),
            ));
        }
    }
    for sys in [f_sys, g_sys] {
        if !validate(sys).symmetric {
            return Err(violation(
                Hypothesis::Symmetry,
                format!("{} has no mirror pairing", sys.name()),
            ));
        }
    }
    let kinds = |s: &IfsSpec| s.maps().iter().map(|m| m.kind().clone()).collect::<Vec<_>>();
    if kinds(f_sys) == kinds(g_sys) {
        return Err(violation(
            Hypothesis::DistinctSystems,
            "F = G, so min C(F) = min C(G) and beta_0 <= 0",
        ));
    }
    Ok(())
}

/// F and G conjugated onto `[0, 1]`, keeping their names.
pub(crate) fn unit_pair(f_sys: &IfsSpec, g_sys: &IfsSpec) -> Result<(IfsSpec, IfsSpec)> {
    Ok((f_sys.conjugate_to_unit()?, g_sys.conjugate_to_unit()?))
}

pub(crate) fn extreme_tol() -> Scalar {
    Scalar::ratio(1, 1_000_000_000_000)
}

pub fn compatibility_bounds(f_sys: &IfsSpec, g_sys: &IfsSpec) -> Result<CompatibilityBounds> {
    check_pair(f_sys, g_sys)?;
    let (f, g) = unit_pair(f_sys, g_sys)?;
    let tol = extreme_tol();

    let g_min = extreme_point(&WordSpec::constant(g.name().clone()), &g.as_table(), Side::Min, &tol)?;
    if !g_min.approx_eq(&Scalar::zero(), 10.0) {
        return Err(violation(
            Hypothesis::GMinAtOrigin,
            format!("min C(G) = {} after normalizing the domain to [0, 1]", g_min.to_decimal_string(12)),
        ));
    }
    let eps = extreme_point(&WordSpec::constant(f.name().clone()), &f.as_table(), Side::Min, &tol)?;
    if !(eps.is_positive() && eps < Scalar::ratio(1, 2)) {
        return Err(violation(
            Hypothesis::EpsilonRange,
            format!("min C(F) = {}", eps.to_decimal_string(12)),
        ));
    }
    let zero = Scalar::zero();
    let g_map = g
        .maps()
        .iter()
        .position(|m| m.eval(&zero).is_zero())
        .ok_or_else(|| violation(Hypothesis::GFixesOrigin, "no map of G fixes 0"))?;
    let f_map = f.leftmost_map();
    let (f1, g1) = (&f.maps()[f_map], &g.maps()[g_map]);

    let beta0 = f1.eval(&zero) - g1.eval(&eps);
    if !beta0.is_positive() {
        return Err(violation(
            Hypothesis::Beta0Positive,
            format!("f_1(0) - g_1(eps) = {}", beta0.to_decimal_string(12)),
        ));
    }
    g_one_bound(g1)?;
    f_one_bound(f1, &eps)?;

    let (lf, _) = f.derivative_bounds();
    let (lg, _) = g.derivative_bounds();
    let lambda = lf.min(lg);
    let min_gap = f
        .stage1_gaps()
        .into_iter()
        .chain(g.stage1_gaps())
        .map(|gap| gap.interval)
        .min_by(|a, b| a.length().cmp(&b.length()))
        .ok_or(Error::EmptyInput("stage-1 gaps"))?;
    let width = min_gap.length();
    let gamma0 = Scalar::from_integer(2) / (&lambda * &(&width * &width));
    Ok(CompatibilityBounds {
        lambda,
        epsilon: eps,
        beta0,
        gamma0,
        min_gap,
        f_map,
        g_map,
    })
}

/// Offsets between the limit sets of two words that first disagree at `k0`,
/// with `W'` taking F there and `W''` taking G.
#[derive(Clone, Debug, Serialize)]
pub struct MinGapOffsets {
    pub k0: usize,
    /// `true` when `word2` is `W'`.
    pub swapped: bool,
    /// `min C(W') - min C(W'')`.
    pub min_diff: Scalar,
    /// `a'' - a'` for the gaps containing the leftmost stage-1 gap; absent
    /// when `k0 = 1`, since the stage-1 sets then differ.
    pub a_diff: Option<Scalar>,
    /// `b' - b''`.
    pub b_diff: Option<Scalar>,
    /// `Pos(A'') - Pos(A')`.
    pub pos_diff: Option<Scalar>,
    /// `(beta_0 lambda^k0, 2^-k0)`.
    pub raw_window: (Scalar, Scalar),
    /// `(beta_k0, gamma_k0)`.
    pub claim_window: (Scalar, Scalar),
    pub bounds: CompatibilityBounds,
}

impl MinGapOffsets {
    pub fn in_raw_window(&self) -> bool {
        self.raw_window.0 < self.min_diff && self.min_diff < self.raw_window.1
    }

    /// Every computed difference lies strictly inside `(beta_k0, gamma_k0)`.
    pub fn in_claim_window(&self) -> bool {
        let (lo, hi) = &self.claim_window;
        [Some(&self.min_diff), self.a_diff.as_ref(), self.b_diff.as_ref(), self.pos_diff.as_ref()]
            .into_iter()
            .flatten()
            .all(|v| lo < v && v < hi)
    }
}

struct GapEnds {
    min: Scalar,
    a: Scalar,
    b: Scalar,
}

fn gap_ends(word: &WordSpec, table: &SystemTable, left: &MapSpec, right: &MapSpec, tol: &Scalar) -> Result<GapEnds> {
    let tail = word.shifted(1);
    let lo = extreme_point(&tail, table, Side::Min, tol)?;
    let hi = extreme_point(&tail, table, Side::Max, tol)?;
    let a = left.eval(if left.is_increasing() { &hi } else { &lo });
    let b = right.eval(if right.is_increasing() { &lo } else { &hi });
    Ok(GapEnds {
        min: extreme_point(word, table, Side::Min, tol)?,
        a,
        b,
    })
}

/// Differences of minima, gap endpoints and gap positions for two words
/// compared within their first `depth` symbols.
pub fn min_gap_offsets(
    f_sys: &IfsSpec,
    g_sys: &IfsSpec,
    word1: &WordSpec,
    word2: &WordSpec,
    depth: usize,
) -> Result<MinGapOffsets> {
    let p1 = word1.prefix(depth)?;
    let p2 = word2.prefix(depth)?;
    let k0 = p1
        .iter()
        .zip(&p2)
        .position(|(a, b)| a != b)
        .ok_or(Error::NoDisagreement(depth))?
        + 1;
    let bounds = compatibility_bounds(f_sys, g_sys)?;
    let (f, g) = unit_pair(f_sys, g_sys)?;
    let f_name = f.name().clone();
    let table = SystemTable::from_systems([f, g]);

    let swapped = if p1[k0 - 1] == f_name {
        false
    } else if p2[k0 - 1] == f_name {
        true
    } else {
        return Err(Error::InvalidWord(format!(
            "neither word uses {f_name} at the first disagreement {k0}"
        )));
    };
    let (w1, w2) = if swapped { (word2, word1) } else { (word1, word2) };
    let tol = extreme_tol();

    let (min1, min2, a_diff, b_diff, pos_diff);
    if k0 == 1 {
        min1 = extreme_point(w1, &table, Side::Min, &tol)?;
        min2 = extreme_point(w2, &table, Side::Min, &tol)?;
        a_diff = None;
        b_diff = None;
        pos_diff = None;
    } else {
        let first = table.get(&p1[0])?;
        let gap = first
            .stage1_gaps()
            .into_iter()
            .next()
            .ok_or(Error::EmptyInput("stage-1 gaps"))?;
        let left = &first.maps()[gap.left_map];
        let right = &first.maps()[gap.right_map];
        let e1 = gap_ends(w1, &table, left, right, &tol)?;
        let e2 = gap_ends(w2, &table, left, right, &tol)?;
        let pos = |e: &GapEnds| (&e.a - &e.min) / (&e.b - &e.a);
        a_diff = Some(&e2.a - &e1.a);
        b_diff = Some(&e1.b - &e2.b);
        pos_diff = Some(pos(&e2) - pos(&e1));
        min1 = e1.min;
        min2 = e2.min;
    }
    let k = k0 as u32;
    Ok(MinGapOffsets {
        k0,
        swapped,
        min_diff: min1 - min2,
        a_diff,
        b_diff,
        pos_diff,
        raw_window: bounds.raw_window(k),
        claim_window: (bounds.beta(k), bounds.gamma(k)),
        bounds,
    })
}
