use serde::Serialize;

use super::{Outcome, Report};
use crate::error::Result;
use crate::numerics::{Arithmetic, Scalar};
use crate::systems::MirrorLaw;

/// CSV header of every command. Each row also ends with an `arithmetic`
/// column: `exact`, or `pN` for N-bit precision.
pub const CSV_COLUMNS: &[(&str, &[&str])] = &[
    (
        "validate",
        &[
            "system",
            "contraction_ok",
            "disjoint_ok",
            "sup_derivative",
            "inf_derivative",
            "symmetric",
            "mirror_law",
            "endpoint_preserving",
            "half_derivative_ok",
            "hull_lo",
            "hull_hi",
        ],
    ),
    ("stages", &["depth", "index", "address", "lo", "hi"]),
    (
        "gaps",
        &["lo", "hi", "length", "birth_stage", "parent_address", "system", "label"],
    ),
    (
        "positions",
        &["position", "gap_lo", "gap_hi", "birth_stage", "system", "label", "cluster"],
    ),
    ("dimension", &["row", "depth", "scale", "count", "value"]),
    ("bounds", &["quantity", "k", "value"]),
    (
        "discriminate",
        &[
            "delta_index",
            "delta",
            "spectrum_size",
            "cluster_count",
            "min_center_spacing",
            "stabilized",
            "k",
            "gamma_k",
            "witness_index",
            "consistent_with_single_ifs",
        ],
    ),
    (
        "orbit",
        &["ell", "lo", "hi", "length", "verified", "birth_stage", "label", "gamma"],
    ),
    ("violation", &["hypothesis", "detail"]),
];

fn header(name: &str) -> &'static [&'static str] {
    CSV_COLUMNS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, h)| *h)
        .expect("every command has a header")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn law(l: Option<MirrorLaw>) -> String {
    match l {
        Some(MirrorLaw::Pointwise) => "pointwise".into(),
        Some(MirrorLaw::Conjugate) => "conjugate".into(),
        None => String::new(),
    }
}

fn table(outcome: &Outcome) -> (&'static str, Vec<Vec<String>>) {
    let s = |x: &Scalar| x.to_string();
    match &outcome.report {
        Report::Validate(reports) => (
            "validate",
            reports
                .iter()
                .map(|r| {
                    vec![
                        r.system.to_string(),
                        r.contraction_ok.to_string(),
                        r.disjoint_ok.to_string(),
                        s(&r.sup_derivative),
                        s(&r.inf_derivative),
                        r.symmetric.to_string(),
                        law(r.mirror_law),
                        r.endpoint_preserving.to_string(),
                        r.half_derivative_ok.to_string(),
                        s(r.hull.lo()),
                        s(r.hull.hi()),
                        r.arithmetic.to_string(),
                    ]
                })
                .collect(),
        ),
        Report::Stages(st) => (
            "stages",
            st.intervals
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    vec![
                        st.depth.to_string(),
                        i.to_string(),
                        b.address.to_string(),
                        s(b.interval.lo()),
                        s(b.interval.hi()),
                    ]
                })
                .collect(),
        ),
        Report::Gaps(gaps) => (
            "gaps",
            gaps.iter()
                .map(|g| {
                    vec![
                        s(g.interval.lo()),
                        s(g.interval.hi()),
                        s(&g.interval.length()),
                        g.birth_stage.to_string(),
                        g.parent_address.to_string(),
                        g.system.to_string(),
                        g.label.to_string(),
                    ]
                })
                .collect(),
        ),
        Report::Positions(p) => (
            "positions",
            p.spectrum
                .entries
                .iter()
                .map(|e| {
                    let cluster = p.clusters.as_ref().and_then(|cs| member_of(cs, &e.position, p.eta.as_ref()));
                    vec![
                        s(&e.position),
                        s(e.gap.interval.lo()),
                        s(e.gap.interval.hi()),
                        e.gap.birth_stage.to_string(),
                        e.gap.system.to_string(),
                        e.gap.label.to_string(),
                        opt(cluster),
                    ]
                })
                .collect(),
        ),
        Report::Dimension(d) => {
            let mut rows: Vec<Vec<String>> = d
                .per_scale
                .iter()
                .map(|r| {
                    vec![
                        "scale".into(),
                        r.depth.to_string(),
                        s(&r.scale),
                        r.count.to_string(),
                        String::new(),
                    ]
                })
                .collect();
            let summary = |name: &str, v: String| vec![name.into(), String::new(), String::new(), String::new(), v];
            rows.push(summary("box_estimate", d.box_estimate.to_string()));
            rows.push(summary("exact_value", opt(d.exact_value)));
            rows.push(summary("mass_lower_bound", opt(d.mass_lower_bound)));
            rows.push(summary("epsilon_sep", opt(d.epsilon_sep.as_ref())));
            ("dimension", rows)
        }
        Report::Bounds(b) => {
            let c = &b.bounds;
            let row = |q: &str, k: Option<u32>, v: &Scalar| vec![q.to_string(), opt(k), s(v)];
            let mut rows = vec![
                row("lambda", None, &c.lambda),
                row("epsilon", None, &c.epsilon),
                row("beta0", None, &c.beta0),
                row("gamma0", None, &c.gamma0),
                row("min_gap_lo", None, c.min_gap.lo()),
                row("min_gap_hi", None, c.min_gap.hi()),
            ];
            for r in &b.schedule {
                rows.push(row("beta", Some(r.k), &r.beta));
                rows.push(row("gamma", Some(r.k), &r.gamma));
                rows.push(row("raw_lower", Some(r.k), &r.raw_window.0));
                rows.push(row("raw_upper", Some(r.k), &r.raw_window.1));
            }
            ("bounds", rows)
        }
        Report::Discriminate(d) => (
            "discriminate",
            d.rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    vec![
                        i.to_string(),
                        s(&r.delta),
                        r.spectrum_size.to_string(),
                        r.cluster_count.to_string(),
                        opt(r.min_center_spacing.as_ref()),
                        d.stabilized.to_string(),
                        opt(d.k),
                        opt(d.gamma_k.as_ref()),
                        opt(d.witness.as_ref().map(|w| w.delta_index)),
                        d.consistent_with_single_ifs.to_string(),
                    ]
                })
                .collect(),
        ),
        Report::Orbit(o) => (
            "orbit",
            o.gaps
                .iter()
                .map(|g| {
                    vec![
                        g.ell.to_string(),
                        s(g.interval.lo()),
                        s(g.interval.hi()),
                        s(&g.interval.length()),
                        g.record.is_some().to_string(),
                        opt(g.record.as_ref().map(|r| r.birth_stage)),
                        opt(g.record.as_ref().map(|r| r.label)),
                        s(&o.gamma),
                    ]
                })
                .collect(),
        ),
        Report::Violation(v) => ("violation", vec![vec![v.hypothesis.to_string(), v.detail.clone()]]),
    }
}

/// Index of the cluster whose member range contains `x`.
fn member_of(clusters: &[super::Cluster], x: &Scalar, eta: Option<&Scalar>) -> Option<usize> {
    eta?;
    let two = Scalar::from_integer(2);
    clusters.iter().position(|c| {
        let half = &c.width / &two;
        &(&c.center - &half) <= x && x <= &(&c.center + &half)
    })
}

pub(super) fn csv(outcome: &Outcome) -> Result<String> {
    let (name, rows) = table(outcome);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut head: Vec<&str> = header(name).to_vec();
    head.push("arithmetic");
    w.write_record(&head)?;
    let arith = outcome.arithmetic.to_string();
    for mut row in rows {
        // validate rows carry their own per-system arithmetic
        if row.len() < head.len() {
            row.push(arith.clone());
        }
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    arithmetic: Arithmetic,
    result: &'a Report,
}

pub(super) fn json(outcome: &Outcome) -> Result<String> {
    let env = Envelope {
        command: outcome.command,
        arithmetic: outcome.arithmetic,
        result: &outcome.report,
    };
    let mut text = serde_json::to_string_pretty(&env)?;
    text.push('\n');
    Ok(text)
}
