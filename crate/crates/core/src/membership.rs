//! Membership in the local (L), two-local (L2) and Svetlichny-box (R) polytopes.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_rational::BigRational;
use num_traits::One;

use crate::boxes::{make_vertex, polytope_vertices, TripartiteBox, VertexLabel, TRI_LEN};
use crate::error::BoxError;
use crate::lp::{LinearProgram, LpOutcome};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polytope {
    Local,
    TwoLocal,
    SvetlichnyBox,
}

impl Polytope {
    pub const ALL: [Polytope; 3] = [Polytope::Local, Polytope::TwoLocal, Polytope::SvetlichnyBox];

    pub fn vertices(self) -> Vec<VertexLabel> {
        polytope_vertices(self as usize)
    }

    pub fn contains_vertex(self, label: &VertexLabel) -> bool {
        match label {
            VertexLabel::Deterministic(_) => true,
            VertexLabel::TwoLocal { .. } => self != Polytope::Local,
            VertexLabel::Svetlichny(_) => self == Polytope::SvetlichnyBox,
            VertexLabel::Mermin(_) => false,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Polytope::Local => "L",
            Polytope::TwoLocal => "L2",
            Polytope::SvetlichnyBox => "R",
        }
    }
}

impl fmt::Display for Polytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Polytope {
    type Err = BoxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "L" => Ok(Polytope::Local),
            "L2" => Ok(Polytope::TwoLocal),
            "R" => Ok(Polytope::SvetlichnyBox),
            _ => Err(BoxError::BadLabel(s.to_string())),
        }
    }
}

/// Either convex weights reproducing the box, or a separating functional.
///
/// `farkas` has 65 entries: one per box entry, then one for normalization.
/// It certifies `y·V + y₆₄ ≤ 0` on every vertex and `y·P + y₆₄ > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipWitness {
    pub polytope: Polytope,
    pub feasible: bool,
    pub weights: Vec<(VertexLabel, Scalar)>,
    pub farkas: Option<Vec<Scalar>>,
}

/// Vertex and Mermin-box entries are rational.
fn rational_entry(v: &Scalar) -> BigRational {
    debug_assert!(v.is_rational());
    v.rational_part().clone()
}

/// LP with one column per box and the target as right-hand side:
/// `Σ c_j B_j = target`, `Σ c_j = 1`.
pub(crate) fn mixture_program(target: &TripartiteBox, boxes: &[TripartiteBox]) -> LinearProgram {
    let mut lp = LinearProgram::new(boxes.len());
    for i in 0..TRI_LEN {
        let coeffs = boxes
            .iter()
            .enumerate()
            .filter(|(_, b)| !b.entries()[i].is_zero())
            .map(|(j, b)| (j, rational_entry(&b.entries()[i])))
            .collect();
        lp.add_row(coeffs, target.entries()[i].clone());
    }
    lp.add_row((0..boxes.len()).map(|j| (j, BigRational::one())).collect(), Scalar::one());
    lp
}

pub fn lp_feasible(b: &TripartiteBox, polytope: Polytope) -> MembershipWitness {
    let labels = polytope.vertices();
    let boxes: Vec<_> = labels.iter().map(make_vertex).collect();
    let lp = mixture_program(b, &boxes);
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => MembershipWitness {
            polytope,
            feasible: true,
            weights: labels.into_iter().zip(x).filter(|(_, w)| !w.is_zero()).collect(),
            farkas: None,
        },
        LpOutcome::Infeasible { farkas } => {
            MembershipWitness { polytope, feasible: false, weights: Vec::new(), farkas: Some(farkas) }
        }
        LpOutcome::Unbounded => unreachable!("feasibility programs have a zero objective"),
    }
}

fn functional(y: &[Scalar], b: &TripartiteBox) -> Scalar {
    let mut s = y[TRI_LEN].clone();
    for (yi, e) in y.iter().zip(b.entries()) {
        if !e.is_zero() && !yi.is_zero() {
            s += yi * e;
        }
    }
    s
}

/// Re-checks a witness from scratch: reconstruction for a feasible one,
/// separation over every vertex for an infeasible one.
pub fn verify_witness(b: &TripartiteBox, w: &MembershipWitness) -> bool {
    if w.feasible {
        if w.weights.iter().any(|(l, c)| c.is_negative() || !w.polytope.contains_vertex(l)) {
            return false;
        }
        if w.weights.iter().map(|(_, c)| c).sum::<Scalar>() != Scalar::one() {
            return false;
        }
        let boxes: Vec<_> = w.weights.iter().map(|(l, _)| make_vertex(l)).collect();
        let terms: Vec<_> = w.weights.iter().map(|(_, c)| c).zip(&boxes).collect();
        return TripartiteBox::combine(&terms) == *b;
    }
    let Some(y) = &w.farkas else {
        return false;
    };
    if y.len() != TRI_LEN + 1 || !functional(y, b).is_positive() {
        return false;
    }
    w.polytope.vertices().iter().all(|l| !functional(y, &make_vertex(l)).is_positive())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipReport {
    pub nonsignaling: bool,
    pub in_r: bool,
    pub in_l2: bool,
    pub in_l: bool,
    /// One witness per polytope, in the order R, L2, L.
    pub witnesses: Vec<MembershipWitness>,
}

/// Tests R, then L2, then L; a separating functional for a larger polytope
/// is reused for the smaller ones it contains.
pub fn classify(b: &TripartiteBox) -> MembershipReport {
    let mut report = MembershipReport {
        nonsignaling: b.validate().is_valid(),
        in_r: false,
        in_l2: false,
        in_l: false,
        witnesses: Vec::new(),
    };
    if !report.nonsignaling {
        return report;
    }
    let mut last: Option<MembershipWitness> = None;
    for p in [Polytope::SvetlichnyBox, Polytope::TwoLocal, Polytope::Local] {
        let w = match &last {
            Some(prev) if !prev.feasible => MembershipWitness { polytope: p, ..prev.clone() },
            _ => lp_feasible(b, p),
        };
        match p {
            Polytope::SvetlichnyBox => report.in_r = w.feasible,
            Polytope::TwoLocal => report.in_l2 = w.feasible,
            Polytope::Local => report.in_l = w.feasible,
        }
        report.witnesses.push(w.clone());
        last = Some(w);
    }
    report
}
