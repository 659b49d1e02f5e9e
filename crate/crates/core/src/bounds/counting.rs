//! Label-reuse counting over families of static forests.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::bits::Label;
use crate::forest::QueryKind;
use crate::schemes::StaticScheme;

use super::{exact_log, fab_forest, gab_forest, invalid, BoundsError, FamilyKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    /// Connectivity: `F_n(3^j, 1)`.
    Warmup,
    /// Non-unique connectivity and siblings: `F_n(3^j, n/3^j)`.
    Thm6,
    /// Unique connectivity and siblings: `F_n(x^a, x^b)`, `a + b <= log_x n`.
    Thm7,
    /// Unique connectivity and ancestry: `G_n(x^a, x^b)`.
    Thm8,
}

impl Theorem {
    pub fn for_kind(kind: FamilyKind) -> Option<Self> {
        match kind {
            FamilyKind::Warmup => Some(Theorem::Warmup),
            FamilyKind::Thm6 => Some(Theorem::Thm6),
            FamilyKind::Thm7 => Some(Theorem::Thm7),
            FamilyKind::Thm8 => Some(Theorem::Thm8),
            _ => None,
        }
    }

    pub fn kind(self) -> FamilyKind {
        match self {
            Theorem::Warmup => FamilyKind::Warmup,
            Theorem::Thm6 => FamilyKind::Thm6,
            Theorem::Thm7 => FamilyKind::Thm7,
            Theorem::Thm8 => FamilyKind::Thm8,
        }
    }

    fn base(self, x: u64) -> u64 {
        match self {
            Theorem::Warmup | Theorem::Thm6 => 3,
            Theorem::Thm7 | Theorem::Thm8 => x,
        }
    }
}

/// The `(a, b)` forests in the order the encoder is assumed to label them.
/// For the two-parameter theorems: by `a + b` (as exponents), then by `b`.
pub fn lemma4_order(theorem: Theorem, n: u64, x: u64) -> Result<Vec<(u64, u64)>, BoundsError> {
    let base = theorem.base(x);
    if base < 2 {
        return Err(invalid("x must be at least 2"));
    }
    let l = exact_log(n, base).ok_or_else(|| invalid(format!("{n} is not a power of {base}")))?;
    let p = |e: u32| base.pow(e);
    Ok(match theorem {
        Theorem::Warmup => (0..=l).map(|j| (p(j), 1)).collect(),
        Theorem::Thm6 => (0..=l).map(|j| (p(j), n / p(j))).collect(),
        Theorem::Thm7 | Theorem::Thm8 => (0..=l)
            .flat_map(|s| (0..=s).map(move |b| (p(s - b), p(b))))
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingStep {
    pub a: u64,
    pub b: u64,
    /// `n - Σ_{earlier j} min(a_j, a) min(b_j, b) n / (ab)`.
    pub direct: Ratio<i128>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingReport {
    pub theorem: Theorem,
    pub n: u64,
    pub x: u64,
    /// Per-forest bound the theorem states.
    pub bound_expr: String,
    pub bound: Ratio<i128>,
    /// `true` when each step must exceed the bound strictly.
    pub strict: bool,
    pub steps: Vec<CountingStep>,
    pub total_direct: Ratio<i128>,
    pub all_hold: bool,
}

/// Evaluates the reuse bound for every forest of the theorem's family
/// under exact arithmetic and compares each step with the stated bound.
pub fn counting_oracle(theorem: Theorem, n: u64, x: u64) -> Result<CountingReport, BoundsError> {
    let order = lemma4_order(theorem, n, x)?;
    let ni = i128::from(n);
    let (bound_expr, bound, strict) = match theorem {
        Theorem::Warmup | Theorem::Thm6 => ("n/2".into(), Ratio::new(ni, 2), true),
        Theorem::Thm7 | Theorem::Thm8 => {
            let xi = i128::from(x);
            (
                "n-n(3x+1)/(x-1)^2".into(),
                Ratio::from_integer(ni) - Ratio::new(ni * (3 * xi + 1), (xi - 1) * (xi - 1)),
                false,
            )
        }
    };
    let mut steps = Vec::with_capacity(order.len());
    for (i, &(a, b)) in order.iter().enumerate() {
        let (ai, bi) = (i128::from(a), i128::from(b));
        let mut direct = Ratio::from_integer(ni);
        for &(c, d) in &order[..i] {
            let shared = i128::from(a.min(c)) * i128::from(b.min(d));
            direct -= Ratio::new(shared * ni, ai * bi);
        }
        let holds = if strict { direct > bound } else { direct >= bound };
        steps.push(CountingStep { a, b, direct, holds });
    }
    let total_direct = steps.iter().map(|s| s.direct).sum();
    let all_hold = steps.iter().all(|s| s.holds);
    Ok(CountingReport {
        theorem,
        n,
        x,
        bound_expr,
        bound,
        strict,
        steps,
        total_direct,
        all_hold,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionViolation {
    pub ab: (u64, u64),
    pub cd: (u64, u64),
    pub shared: u64,
    pub bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionReport {
    pub scheme: String,
    pub kind: FamilyKind,
    pub n: u64,
    /// Parameter every forest was encoded with.
    pub encode_n: u64,
    pub pairs: u64,
    pub violations: Vec<IntersectionViolation>,
}

/// Encodes `F_n(a,b)` (or `G_n(a,b)`) for every parameter pair and checks
/// Largest label overlap allowed between the forests for `(a, b)` and `(c, d)`.
pub fn intersection_bound((a, b): (u64, u64), (c, d): (u64, u64), n: u64) -> u64 {
    a.min(c) * b.min(d) * (n / (a * b))
}

/// `|e₁ ∩ e₂| <= min(a,c) min(b,d) n/(ab)` for every ordered pair with
/// `ab >= cd`. `e` is the label set of the `n` non-root nodes; all forests
/// are encoded with the common parameter `2n`.
pub fn lemma3_intersection_check(
    scheme: &StaticScheme,
    kind: FamilyKind,
    n: u64,
    params: &[(u64, u64)],
) -> Result<IntersectionReport, BoundsError> {
    let second = match kind {
        FamilyKind::Fab => QueryKind::Sibling,
        FamilyKind::Gab => QueryKind::Ancestry,
        _ => return Err(invalid("intersection check runs on Fab or Gab")),
    };
    if !scheme.is_unique() || !scheme.supports(QueryKind::Connectivity) || !scheme.supports(second) {
        return Err(invalid(format!(
            "{} must be unique and answer connectivity and {second}",
            scheme.name()
        )));
    }
    let encode_n = 2 * n;
    let mut sets: Vec<BTreeSet<Label>> = Vec::with_capacity(params.len());
    for &(a, b) in params {
        if a == 0 || b == 0 || !n.is_multiple_of(a * b) {
            return Err(invalid(format!("ab must divide n, got a={a} b={b}")));
        }
        let forest = if kind == FamilyKind::Fab {
            fab_forest(n, a, b)
        } else {
            gab_forest(n, a, b)
        };
        let labels = scheme.encode(&forest, encode_n)?;
        sets.push(
            forest
                .nodes()
                .filter(|&v| !forest.is_root(v))
                .map(|v| labels.get(v).expect("every node labelled").clone())
                .collect(),
        );
    }
    let mut pairs = 0;
    let mut violations = Vec::new();
    for (i, &(a, b)) in params.iter().enumerate() {
        for (j, &(c, d)) in params.iter().enumerate() {
            if i == j || a * b < c * d {
                continue;
            }
            pairs += 1;
            let shared = sets[i].intersection(&sets[j]).count() as u64;
            let bound = intersection_bound((a, b), (c, d), n);
            if shared > bound {
                violations.push(IntersectionViolation {
                    ab: (a, b),
                    cd: (c, d),
                    shared,
                    bound,
                });
            }
        }
    }
    Ok(IntersectionReport {
        scheme: scheme.name(),
        kind,
        n,
        encode_n,
        pairs,
        violations,
    })
}
