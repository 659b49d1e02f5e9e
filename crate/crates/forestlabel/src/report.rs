//! Text and JSON renderings of bound certificates and measurement tables.

use forestlabel_core::bits::ceil_log2;
use forestlabel_core::bounds::{
    BoundCertificate, CountingReport, FamilySpec, IntersectionReport, YaoReport,
};
use num_rational::Ratio;
use serde_json::{json, Value};

pub fn ratio(r: &Ratio<i128>) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// One certificate, in text and JSON form.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub text: String,
    pub json: Value,
}

fn line(spec: &FamilySpec, certified: u64, bits: u32, expr: &str, value: &Ratio<i128>) -> String {
    format!(
        "family={} n={} params={} certified={certified} implied_bits={bits} theory={expr}={}",
        spec.kind,
        spec.n,
        spec.params(),
        ratio(value)
    )
}

pub fn certificate(c: &BoundCertificate) -> Entry {
    let queries: Vec<&str> = c.queries.iter().map(|q| q.name()).collect();
    Entry {
        text: line(&c.family, c.certified_count, c.implied_bits, &c.theory_expr, &c.theory_value),
        json: json!({
            "family": c.family.kind.name(),
            "n": c.family.n,
            "params": c.family.params(),
            "queries": queries,
            "certified": c.certified_count,
            "implied_bits": c.implied_bits,
            "theory": { "expr": c.theory_expr, "value": ratio(&c.theory_value) },
            "witness_stats": {
                "pairs": c.stats.pairs,
                "by_uniqueness": c.stats.by_uniqueness,
                "by_query": c.stats.by_query,
                "missing": c.stats.missing.len(),
            },
        }),
    }
}

/// The certified count is the floor of the summed per-forest minimums; the
/// theory value is the per-forest bound times the number of forests.
pub fn counting(spec: &FamilySpec, r: &CountingReport) -> Entry {
    let certified = r.total_direct.floor().to_integer().max(0) as u64;
    let bits = ceil_log2(certified);
    let forests = r.steps.len() as i128;
    let total_bound = r.bound * Ratio::from_integer(forests);
    let expr = format!("{forests}*({})", r.bound_expr);
    let steps: Vec<Value> = r
        .steps
        .iter()
        .map(|s| json!({ "a": s.a, "b": s.b, "direct": ratio(&s.direct), "holds": s.holds }))
        .collect();
    Entry {
        text: line(spec, certified, bits, &expr, &total_bound),
        json: json!({
            "family": spec.kind.name(),
            "n": spec.n,
            "params": spec.params(),
            "certified": certified,
            "implied_bits": bits,
            "theory": { "expr": expr, "value": ratio(&total_bound) },
            "per_forest_bound": ratio(&r.bound),
            "strict": r.strict,
            "steps": steps,
            "all_hold": r.all_hold,
        }),
    }
}

pub fn intersection(r: &IntersectionReport) -> Entry {
    let violations: Vec<Value> = r
        .violations
        .iter()
        .map(|v| json!({ "ab": [v.ab.0, v.ab.1], "cd": [v.cd.0, v.cd.1], "shared": v.shared, "bound": v.bound }))
        .collect();
    Entry {
        text: format!(
            "family={} n={} scheme={} encode_n={} ordered_pairs={} violations={}",
            r.kind,
            r.n,
            r.scheme,
            r.encode_n,
            r.pairs,
            r.violations.len()
        ),
        json: json!({
            "family": r.kind.name(),
            "n": r.n,
            "scheme": r.scheme,
            "encode_n": r.encode_n,
            "ordered_pairs": r.pairs,
            "violations": violations,
        }),
    }
}

pub fn emitted(scheme: &str, spec: &FamilySpec, count: u64, certified: u64) -> Entry {
    Entry {
        text: format!(
            "emitted scheme={scheme} family={} n={} distinct={count} certified={certified} sound={}",
            spec.kind,
            spec.n,
            count >= certified
        ),
        json: json!({
            "scheme": scheme,
            "family": spec.kind.name(),
            "n": spec.n,
            "distinct": count,
            "certified": certified,
            "sound": count >= certified,
        }),
    }
}

pub fn yao(scheme: &str, r: &YaoReport) -> Entry {
    let holds = r.expected_max >= r.bound;
    Entry {
        text: format!(
            "yao scheme={scheme} n={} family_size={} expected_max={} bound={} holds={holds}",
            r.n,
            r.family_size,
            ratio(&r.expected_max),
            ratio(&r.bound)
        ),
        json: json!({
            "scheme": scheme,
            "n": r.n,
            "family_size": r.family_size,
            "expected_max": ratio(&r.expected_max),
            "bound": ratio(&r.bound),
            "holds": holds,
        }),
    }
}

/// Measured maximum label sizes, one row per scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeTable {
    pub ns: Vec<u64>,
    pub rows: Vec<(String, Vec<usize>)>,
}

impl SizeTable {
    pub fn text(&self) -> String {
        let width = self.rows.iter().map(|(s, _)| s.len()).max().unwrap_or(6).max(6);
        let mut out = format!("{:<width$}", "scheme");
        for n in &self.ns {
            out.push_str(&format!(" {:>8}", format!("n={n}")));
        }
        out.push('\n');
        for (scheme, bits) in &self.rows {
            out.push_str(&format!("{scheme:<width$}"));
            for b in bits {
                out.push_str(&format!(" {b:>8}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|(s, bits)| json!({ "scheme": s, "max_bits": bits }))
            .collect();
        json!({ "n": self.ns, "rows": rows })
    }
}
