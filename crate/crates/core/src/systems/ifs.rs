use std::collections::BTreeMap;

use serde::Serialize;

use super::map::{MapKind, MapSpec};
use crate::attractor::{extreme_point, Side};
use crate::error::{Error, Result};
use crate::numerics::{hull, pairwise_disjoint, Arithmetic, Interval, IntervalMap, Scalar, DEFAULT_PRECISION};
use crate::words::{Label, WordSpec};

/// A finite family of maps on a common interval domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IfsSpec {
    name: Label,
    domain: Interval,
    maps: Vec<MapSpec>,
    #[serde(skip)]
    precision: u32,
}

/// Which reflection law pairs the maps of a symmetric system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MirrorLaw {
    /// `2c - f(x)`
    Pointwise,
    /// `2c - f(2c - x)`
    Conjugate,
}

/// A stage-1 gap of a single system: the space between two consecutive
/// images, numbered left to right from 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageOneGap {
    pub label: usize,
    pub interval: Interval,
    pub left_map: usize,
    pub right_map: usize,
}

impl IfsSpec {
    pub fn new(name: impl Into<Label>, domain: Interval, kinds: Vec<MapKind>) -> Result<Self> {
        let maps = kinds
            .into_iter()
            .map(|k| MapSpec::new(k, domain.clone()))
            .collect::<Result<Vec<_>>>()?;
        IfsSpec::from_maps(name, domain, maps)
    }

    /// Affine maps from `(slope, offset)` pairs on the unit interval.
    pub fn affine_unit(name: impl Into<Label>, maps: &[(Scalar, Scalar)]) -> Result<Self> {
        let kinds = maps
            .iter()
            .map(|(s, o)| MapKind::affine(s.clone(), o.clone()))
            .collect();
        IfsSpec::new(name, Interval::unit(), kinds)
    }

    pub fn from_maps(name: impl Into<Label>, domain: Interval, maps: Vec<MapSpec>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::EmptyInput("IFS with no maps"));
        }
        if maps.iter().any(|m| m.domain() != &domain) {
            return Err(Error::DomainMismatch);
        }
        Ok(IfsSpec {
            name: name.into(),
            domain,
            maps,
            precision: DEFAULT_PRECISION,
        })
    }

    /// Working precision used when the system is not exact.
    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision = bits;
        self
    }

    pub fn name(&self) -> &Label {
        &self.name
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn maps(&self) -> &[MapSpec] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn is_affine(&self) -> bool {
        self.maps.iter().all(MapSpec::is_affine)
    }

    pub fn arithmetic(&self) -> Arithmetic {
        if self.is_affine() {
            Arithmetic::Exact
        } else {
            Arithmetic::Precision(self.precision)
        }
    }

    pub fn images(&self) -> Vec<Interval> {
        self.maps.iter().map(MapSpec::image).collect()
    }

    /// Map indices sorted by the left endpoint of their images.
    pub fn image_order(&self) -> Vec<usize> {
        let images = self.images();
        let mut order: Vec<usize> = (0..self.maps.len()).collect();
        order.sort_by(|&a, &b| images[a].lo().cmp(images[b].lo()));
        order
    }

    pub fn leftmost_map(&self) -> usize {
        self.image_order()[0]
    }

    pub fn rightmost_map(&self) -> usize {
        *self.image_order().last().expect("nonempty system")
    }

    pub fn stage1_gaps(&self) -> Vec<StageOneGap> {
        let images = self.images();
        self.image_order()
            .windows(2)
            .enumerate()
            .filter_map(|(label, w)| {
                Interval::new(images[w[0]].hi().clone(), images[w[1]].lo().clone())
                    .ok()
                    .map(|interval| StageOneGap {
                        label,
                        interval,
                        left_map: w[0],
                        right_map: w[1],
                    })
            })
            .collect()
    }

    /// `(inf |f'|, sup |f'|)` over all maps and the domain.
    pub fn derivative_bounds(&self) -> (Scalar, Scalar) {
        let mut ranges = self.maps.iter().map(MapSpec::derivative_range);
        let (mut lo, mut hi) = ranges.next().expect("nonempty system");
        for (a, b) in ranges {
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo, hi)
    }

    /// Contraction and disjointness, the two hypotheses every computation
    /// relies on.
    pub fn ensure_valid(&self) -> Result<()> {
        let (_, sup) = self.derivative_bounds();
        if sup >= Scalar::one() {
            return Err(Error::NotContracting(self.name.to_string()));
        }
        if !pairwise_disjoint(&self.images()) {
            return Err(Error::ImageOverlap(self.name.to_string()));
        }
        Ok(())
    }

    /// For each map, the index of its partner under `law`, if every map has
    /// one.
    pub fn mirror_pairing(&self, law: MirrorLaw) -> Option<Vec<usize>> {
        let c = self.domain.center();
        let kinds: Vec<&MapKind> = self.maps.iter().map(MapSpec::kind).collect();
        self.maps
            .iter()
            .map(|m| {
                let mirrored = match law {
                    MirrorLaw::Pointwise => m.pointwise_mirror(&c),
                    MirrorLaw::Conjugate => m.conjugate_mirror(&c),
                }
                .ok()?;
                kinds.iter().position(|k| **k == mirrored)
            })
            .collect()
    }

    /// Same coefficients restricted to a subinterval of the domain.
    pub fn restrict(&self, domain: Interval) -> Result<IfsSpec> {
        let maps = self
            .maps
            .iter()
            .map(|m| m.restrict(domain.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(IfsSpec {
            maps,
            domain,
            ..self.clone()
        })
    }

    fn restrict_with_slack(&self, domain: Interval, slack: &Scalar) -> Result<IfsSpec> {
        let maps = self
            .maps
            .iter()
            .map(|m| m.restrict_with_slack(domain.clone(), slack))
            .collect::<Result<Vec<_>>>()?;
        Ok(IfsSpec {
            maps,
            domain,
            ..self.clone()
        })
    }

    /// Conjugate by the increasing affine bijection of the domain onto
    /// `[0, 1]`.
    pub fn conjugate_to_unit(&self) -> Result<IfsSpec> {
        let len = self.domain.length();
        let a = Scalar::one() / &len;
        let b = -(self.domain.lo() / &len);
        let maps = self
            .maps
            .iter()
            .map(|m| m.conjugate_affine(&a, &b, Interval::unit()))
            .collect::<Result<Vec<_>>>()?;
        Ok(IfsSpec {
            maps,
            domain: Interval::unit(),
            ..self.clone()
        })
    }

    /// A single-system table, handy for constant-word computations.
    pub fn as_table(&self) -> SystemTable {
        let mut t = SystemTable::new();
        t.insert(self.clone());
        t
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub system: Label,
    pub arithmetic: Arithmetic,
    pub contraction_ok: bool,
    pub disjoint_ok: bool,
    pub sup_derivative: Scalar,
    pub inf_derivative: Scalar,
    pub symmetric: bool,
    /// Law used for `mirror_pairing`; conjugate is preferred when both hold.
    pub mirror_law: Option<MirrorLaw>,
    pub mirror_pairing: Option<Vec<usize>>,
    pub pointwise_mirror: bool,
    pub conjugate_mirror: bool,
    pub endpoint_preserving: bool,
    pub half_derivative_ok: bool,
    pub images: Vec<Interval>,
    pub hull: Interval,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.contraction_ok && self.disjoint_ok
    }
}

pub fn validate(sys: &IfsSpec) -> ValidationReport {
    let (inf, sup) = sys.derivative_bounds();
    let images = sys.images();
    let image_hull = hull(&images).expect("nonempty system");
    let pointwise = sys.mirror_pairing(MirrorLaw::Pointwise);
    let conjugate = sys.mirror_pairing(MirrorLaw::Conjugate);
    let (mirror_law, mirror_pairing) = match (&conjugate, &pointwise) {
        (Some(p), _) => (Some(MirrorLaw::Conjugate), Some(p.clone())),
        (None, Some(p)) => (Some(MirrorLaw::Pointwise), Some(p.clone())),
        (None, None) => (None, None),
    };
    ValidationReport {
        system: sys.name.clone(),
        arithmetic: sys.arithmetic(),
        contraction_ok: sup < Scalar::one() && inf.is_positive(),
        disjoint_ok: pairwise_disjoint(&images),
        half_derivative_ok: sup < Scalar::ratio(1, 2),
        sup_derivative: sup,
        inf_derivative: inf,
        symmetric: mirror_law.is_some(),
        mirror_law,
        mirror_pairing,
        pointwise_mirror: pointwise.is_some(),
        conjugate_mirror: conjugate.is_some(),
        endpoint_preserving: image_hull == sys.domain,
        images,
        hull: image_hull,
    }
}

/// Both systems restricted to the hull of their two limit sets.
#[derive(Clone, Debug, Serialize)]
pub struct NormalizedPair {
    pub f: IfsSpec,
    pub g: IfsSpec,
    pub domain: Interval,
    pub f_limits: (Scalar, Scalar),
    pub g_limits: (Scalar, Scalar),
}

/// Restrict `f_sys` and `g_sys` to `[min(min C(F), min C(G)), max(max C(F), max C(G))]`.
///
/// Limit-set extremes are located to within `tol`; in exact mode they are
/// exact for affine systems. In precision mode the restricted images may
/// overshoot the new domain by at most `tol`.
pub fn normalize_endpoints(f_sys: &IfsSpec, g_sys: &IfsSpec, tol: &Scalar) -> Result<NormalizedPair> {
    f_sys.ensure_valid()?;
    g_sys.ensure_valid()?;
    if f_sys.domain != g_sys.domain {
        return Err(Error::DomainMismatch);
    }
    let limits = |sys: &IfsSpec| -> Result<(Scalar, Scalar)> {
        let table = sys.as_table();
        let word = WordSpec::constant(sys.name.clone());
        Ok((
            extreme_point(&word, &table, Side::Min, tol)?,
            extreme_point(&word, &table, Side::Max, tol)?,
        ))
    };
    let f_limits = limits(f_sys)?;
    let g_limits = limits(g_sys)?;
    let lo = f_limits.0.clone().min(g_limits.0.clone());
    let hi = f_limits.1.clone().max(g_limits.1.clone());
    let domain = Interval::new(lo, hi)?;
    let exact = f_sys.arithmetic().is_exact() && g_sys.arithmetic().is_exact();
    let (f, g) = if exact {
        (f_sys.restrict(domain.clone())?, g_sys.restrict(domain.clone())?)
    } else {
        (
            f_sys.restrict_with_slack(domain.clone(), tol)?,
            g_sys.restrict_with_slack(domain.clone(), tol)?,
        )
    };
    Ok(NormalizedPair {
        f,
        g,
        domain,
        f_limits,
        g_limits,
    })
}

/// `H^2 = {h ∘ h'}`, outer index most significant.
pub fn compose_system(sys: &IfsSpec) -> Result<IfsSpec> {
    let mut maps = Vec::with_capacity(sys.maps.len() * sys.maps.len());
    for outer in &sys.maps {
        for inner in &sys.maps {
            maps.push(outer.compose(inner)?);
        }
    }
    let composed = IfsSpec {
        name: Label::new(format!("{}²", sys.name)),
        domain: sys.domain.clone(),
        maps,
        precision: sys.precision,
    };
    if !pairwise_disjoint(&composed.images()) {
        return Err(Error::ImageOverlap(composed.name.to_string()));
    }
    Ok(composed)
}

/// Named systems referenced by word symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct SystemTable {
    systems: BTreeMap<Label, IfsSpec>,
}

impl SystemTable {
    pub fn new() -> Self {
        SystemTable::default()
    }

    pub fn from_systems(systems: impl IntoIterator<Item = IfsSpec>) -> Self {
        let mut t = SystemTable::new();
        for s in systems {
            t.insert(s);
        }
        t
    }

    pub fn insert(&mut self, sys: IfsSpec) {
        self.systems.insert(sys.name.clone(), sys);
    }

    pub fn get(&self, label: &Label) -> Result<&IfsSpec> {
        self.systems
            .get(label)
            .ok_or_else(|| Error::UnknownSystem(label.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &IfsSpec> {
        self.systems.values()
    }

    /// The shared domain of all systems.
    pub fn domain(&self) -> Result<&Interval> {
        let mut it = self.systems.values();
        let first = it.next().ok_or(Error::EmptyInput("system table"))?;
        if it.any(|s| s.domain != first.domain) {
            return Err(Error::DomainMismatch);
        }
        Ok(&first.domain)
    }

    /// Combined arithmetic of the systems a word prefix touches.
    pub fn arithmetic_for(&self, prefix: &[Label]) -> Result<Arithmetic> {
        let mut arith = Arithmetic::Exact;
        for l in prefix {
            arith = arith.combine(self.get(l)?.arithmetic());
        }
        Ok(arith)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        Scalar::parse(x).unwrap()
    }

    fn affine(name: &str, maps: &[(&str, &str)]) -> IfsSpec {
        let maps: Vec<(Scalar, Scalar)> = maps.iter().map(|(a, b)| (s(a), s(b))).collect();
        IfsSpec::affine_unit(name, &maps).unwrap()
    }

    #[test]
    fn middle_thirds_report() {
        let r = validate(&affine("F", &[("1/3", "0"), ("1/3", "2/3")]));
        assert!(r.contraction_ok && r.disjoint_ok && r.endpoint_preserving);
        assert_eq!(r.sup_derivative, s("1/3"));
        assert_eq!(r.inf_derivative, s("1/3"));
        assert!(r.symmetric && r.conjugate_mirror && !r.pointwise_mirror);
        assert_eq!(r.mirror_pairing, Some(vec![1, 0]));
        assert!(r.half_derivative_ok);
        assert_eq!(r.arithmetic, Arithmetic::Exact);
    }

    #[test]
    fn pointwise_symmetric_not_endpoint_preserving() {
        let r = validate(&affine("F", &[("0.3", "0.1"), ("-0.3", "0.9")]));
        assert!(r.symmetric && r.pointwise_mirror && !r.conjugate_mirror);
        assert_eq!(r.mirror_law, Some(MirrorLaw::Pointwise));
        assert!(!r.endpoint_preserving);
        assert_eq!(r.hull, Interval::new(s("0.1"), s("0.9")).unwrap());
    }

    #[test]
    fn touching_images_are_not_disjoint() {
        let sys = affine("F", &[("1/2", "0"), ("1/2", "1/2")]);
        assert!(!validate(&sys).disjoint_ok);
        assert!(matches!(sys.ensure_valid(), Err(Error::ImageOverlap(_))));
    }

    #[test]
    fn stage_one_gaps_follow_image_order() {
        let sys = affine("G", &[("-0.25", "1"), ("0.25", "0")]);
        let gaps = sys.stage1_gaps();
        assert_eq!(gaps.len(), 1);
        assert_eq!(gaps[0].interval, Interval::new(s("0.25"), s("0.75")).unwrap());
        assert_eq!((gaps[0].left_map, gaps[0].right_map), (1, 0));
    }

    #[test]
    fn composition_examples() {
        let thirds = compose_system(&affine("F", &[("1/3", "0"), ("1/3", "2/3")])).unwrap();
        assert_eq!(thirds.name().as_str(), "F²");
        let offsets: Vec<MapKind> = ["0", "2/9", "2/3", "8/9"]
            .iter()
            .map(|o| MapKind::affine(s("1/9"), s(o)))
            .collect();
        let kinds: Vec<MapKind> = thirds.maps().iter().map(|m| m.kind().clone()).collect();
        assert_eq!(kinds, offsets);

        let half = compose_system(&affine("H", &[("1/2", "0")])).unwrap();
        assert_eq!(half.maps()[0].kind(), &MapKind::affine(s("1/4"), s("0")));

        let g = compose_system(&affine("G", &[("0.25", "0"), ("-0.25", "1")])).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.maps()[3].kind(), &MapKind::affine(s("0.0625"), s("0.75")));
        assert!(g.maps()[3].is_increasing());
    }

    #[test]
    fn composed_derivative_is_squared() {
        let sys = affine("G", &[("0.25", "0"), ("-0.3", "1")]);
        let sup = validate(&sys).sup_derivative;
        let sup2 = validate(&compose_system(&sys).unwrap()).sup_derivative;
        assert!(sup2 <= &sup * &sup);
    }

    #[test]
    fn normalize_unchanged_for_endpoint_preserving() {
        let f = affine("F", &[("1/3", "0"), ("1/3", "2/3")]);
        let n = normalize_endpoints(&f, &f, &s("1e-12")).unwrap();
        assert_eq!(n.domain, Interval::unit());
        assert_eq!(n.f, f);
        assert!(validate(&n.g).endpoint_preserving);
    }

    #[test]
    fn normalize_conjugated_pair() {
        // middle thirds and quarter maps conjugated by x -> 0.2 + 0.6x
        let f = affine("F", &[("1/3", "2/15"), ("1/3", "8/15")]);
        let g = affine("G", &[("1/4", "3/20"), ("1/4", "3/5")]);
        let n = normalize_endpoints(&f, &g, &s("1e-12")).unwrap();
        assert_eq!(n.domain, Interval::new(s("0.2"), s("0.8")).unwrap());
        assert_eq!(n.f_limits, (s("0.2"), s("0.8")));
        assert!(validate(&n.f).endpoint_preserving);
        assert!(validate(&n.g).endpoint_preserving);
    }

    #[test]
    fn normalize_pointwise_example() {
        let f = affine("F", &[("0.3", "0.1"), ("-0.3", "0.9")]);
        let n = normalize_endpoints(&f, &f, &s("1e-12")).unwrap();
        assert_eq!(n.f_limits, (s("1/7"), s("6/7")));
    }

    #[test]
    fn conjugate_to_unit_round_trip() {
        let f = affine("F", &[("1/3", "2/15"), ("1/3", "8/15")]);
        let n = normalize_endpoints(&f, &f, &s("1e-12")).unwrap();
        let unit = n.f.conjugate_to_unit().unwrap();
        let kinds: Vec<MapKind> = unit.maps().iter().map(|m| m.kind().clone()).collect();
        assert_eq!(
            kinds,
            vec![MapKind::affine(s("1/3"), s("0")), MapKind::affine(s("1/3"), s("2/3"))]
        );
    }

    #[test]
    fn table_lookup() {
        let t = SystemTable::from_systems([affine("F", &[("1/3", "0"), ("1/3", "2/3")])]);
        assert!(t.get(&Label::from("F")).is_ok());
        assert!(matches!(t.get(&Label::from("X")), Err(Error::UnknownSystem(_))));
    }
}
