//! Svetlichny and Mermin strengths of boxes in R.
//!
//! A box is split as `μ·Sv + ν·M + (1−μ−ν)·N'` where `Sv` is a Svetlichny
//! vertex, `M` a Mermin box and the residual `N'` is balanced: its `G` and
//! `Q` quantities vanish. For each candidate label the largest admissible
//! weight is found exactly: the residual must stay in R, must not be
//! anti-aligned with the extracted component, and must be balanced.

use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::One;

use crate::boxes::{make_vertex, polytope_vertices, white_noise, TripartiteBox, VertexLabel};
use crate::error::StrengthError;
use crate::inequalities::{label_bits, mermin_value, svetlichny_value};
use crate::lp::{LinearProgram, LpOutcome};
use crate::membership::{lp_feasible, mixture_program, MembershipWitness, Polytope};
use crate::scalar::Scalar;

/// Orders in which the label indices (α, β, γ) are nested, outermost first.
pub const GROUPINGS: [[usize; 3]; 6] =
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn index_of(bits: [u8; 3]) -> usize {
    (bits[0] as usize) << 2 | (bits[1] as usize) << 1 | bits[2] as usize
}

fn at(values: &[Scalar; 8], grouping: [usize; 3], o: u8, m: u8, i: u8) -> &Scalar {
    let mut bits = [0u8; 3];
    bits[grouping[0]] = o;
    bits[grouping[1]] = m;
    bits[grouping[2]] = i;
    &values[index_of(bits)]
}

fn inner(values: &[Scalar; 8], g: [usize; 3], o: u8, m: u8) -> Scalar {
    at(values, g, o, m, 0) - at(values, g, o, m, 1)
}

fn middle(values: &[Scalar; 8], g: [usize; 3], o: u8) -> Scalar {
    inner(values, g, o, 0).abs() - inner(values, g, o, 1).abs()
}

fn outer(values: &[Scalar; 8], g: [usize; 3]) -> Scalar {
    middle(values, g, 0).abs() - middle(values, g, 1).abs()
}

/// `|||v₀₀₀−v₀₀₁| − |v₀₁₀−v₀₁₁|| − ||v₁₀₀−v₁₀₁| − |v₁₁₀−v₁₁₁|||` under one grouping.
pub fn nested_difference(values: &[Scalar; 8], grouping: [usize; 3]) -> Scalar {
    outer(values, grouping).abs()
}

/// Minimum of [`nested_difference`] over all groupings.
pub fn balance(values: &[Scalar; 8]) -> Scalar {
    GROUPINGS
        .iter()
        .map(|&g| nested_difference(values, g))
        .min()
        .expect("six groupings")
}

pub fn svetlichny_vector(b: &TripartiteBox) -> [Scalar; 8] {
    core::array::from_fn(|k| svetlichny_value(b, label_bits::<4>(k << 1)))
}

pub fn mermin_vector(b: &TripartiteBox) -> [Scalar; 8] {
    core::array::from_fn(|k| mermin_value(b, label_bits::<4>(k << 1)))
}

/// `G`: balance of the eight Svetlichny values `S_{αβγ0}`.
pub fn g_quantity(b: &TripartiteBox) -> Scalar {
    balance(&svetlichny_vector(b))
}

/// `Q`: balance of the eight Mermin values `M_{αβγ0}`.
pub fn q_quantity(b: &TripartiteBox) -> Scalar {
    balance(&mermin_vector(b))
}

/// Zeros of a piecewise-linear `f` whose breakpoints all lie in the sorted `pts`.
fn segment_zeros(f: impl Fn(&Scalar) -> Scalar, pts: &[Scalar]) -> Vec<Scalar> {
    let vals: Vec<Scalar> = pts.iter().map(&f).collect();
    let mut out = Vec::new();
    for k in 0..pts.len() {
        if vals[k].is_zero() {
            out.push(pts[k].clone());
        }
        if k + 1 < pts.len() && vals[k].signum() == vals[k + 1].signum().reverse() && !vals[k].is_zero() {
            let t = &vals[k] / &(&vals[k] - &vals[k + 1]);
            out.push(&pts[k] + &(&t * &(&pts[k + 1] - &pts[k])));
        }
    }
    out
}

fn merge(pts: &mut Vec<Scalar>, extra: Vec<Scalar>) {
    pts.extend(extra);
    pts.sort();
    pts.dedup();
}

/// Points in `[0, hi]` containing every kink of `w ↦ nested_difference(v − w·t, g)`.
fn breakpoints(v: &[Scalar; 8], t: &[Scalar; 8], g: [usize; 3], hi: &Scalar) -> Vec<Scalar> {
    let u = |w: &Scalar| -> [Scalar; 8] { core::array::from_fn(|k| &v[k] - &(w * &t[k])) };
    let in_range = |x: &Scalar| !x.is_negative() && x <= hi;
    let mut pts = alloc::vec![Scalar::zero(), hi.clone()];
    for o in 0..2 {
        for m in 0..2 {
            let f = |w: &Scalar| inner(&u(w), g, o, m);
            let z = segment_zeros(f, &[Scalar::zero(), hi.clone()]);
            merge(&mut pts, z.into_iter().filter(in_range).collect());
        }
    }
    for o in 0..2 {
        let z = segment_zeros(|w| middle(&u(w), g, o), &pts);
        merge(&mut pts, z);
    }
    let z = segment_zeros(|w| outer(&u(w), g), &pts);
    merge(&mut pts, z);
    pts
}

/// Largest `w ∈ [0, hi]` with `balance(v − w·t) = 0`.
pub fn largest_balanced_weight(v: &[Scalar; 8], t: &[Scalar; 8], hi: &Scalar) -> Option<Scalar> {
    let mut pts = Vec::new();
    for &g in &GROUPINGS {
        merge(&mut pts, breakpoints(v, t, g, hi));
    }
    pts.into_iter().rev().find(|w| {
        let u: [Scalar; 8] = core::array::from_fn(|k| &v[k] - &(w * &t[k]));
        balance(&u).is_zero()
    })
}

/// Largest `w` with `(P − w·V)/(1 − w) ∈ R`.
fn max_extractable(p: &TripartiteBox, v: &TripartiteBox, r: &[TripartiteBox]) -> Scalar {
    let mut columns = Vec::with_capacity(r.len() + 1);
    columns.push(v.clone());
    columns.extend(r.iter().cloned());
    let mut lp: LinearProgram = mixture_program(p, &columns);
    lp.set_objective(alloc::vec![(0, BigRational::one())]);
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => value,
        _ => Scalar::zero(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Component {
    Svetlichny,
    Mermin,
}

impl Component {
    fn label(self, l: [u8; 4]) -> VertexLabel {
        match self {
            Component::Svetlichny => VertexLabel::Svetlichny(l),
            Component::Mermin => VertexLabel::Mermin(l),
        }
    }

    fn vector(self, b: &TripartiteBox) -> [Scalar; 8] {
        match self {
            Component::Svetlichny => svetlichny_vector(b),
            Component::Mermin => mermin_vector(b),
        }
    }

    fn own_value(self, b: &TripartiteBox, l: [u8; 4]) -> Scalar {
        match self {
            Component::Svetlichny => svetlichny_value(b, l),
            Component::Mermin => mermin_value(b, l),
        }
    }

    fn max_value(self) -> Scalar {
        match self {
            Component::Svetlichny => Scalar::int(8),
            Component::Mermin => Scalar::int(4),
        }
    }
}

struct Extraction {
    weight: Scalar,
    label: Option<[u8; 4]>,
    residual: TripartiteBox,
    balanced: bool,
}

fn extract(p: &TripartiteBox, kind: Component, r: &[TripartiteBox]) -> Extraction {
    let v = kind.vector(p);
    let mut best: Option<(Scalar, [u8; 4])> = None;
    for k in 0..16 {
        let l = label_bits::<4>(k);
        let own = kind.own_value(p, l);
        if own.is_negative() {
            continue;
        }
        let cap = (&own / &kind.max_value()).min(Scalar::one());
        if let Some((b, _)) = &best {
            if cap <= *b {
                continue;
            }
        }
        let vertex = make_vertex(&kind.label(l));
        let hi = if cap.is_zero() { cap } else { cap.min(max_extractable(p, &vertex, r)) };
        let t = kind.vector(&vertex);
        if let Some(w) = largest_balanced_weight(&v, &t, &hi) {
            if best.as_ref().is_none_or(|(b, _)| w > *b) {
                best = Some((w, l));
            }
        }
    }
    match best {
        None => Extraction { weight: Scalar::zero(), label: None, residual: p.clone(), balanced: false },
        Some((w, _)) if w.is_zero() => {
            Extraction { weight: w, label: None, residual: p.clone(), balanced: true }
        }
        Some((w, l)) if w == Scalar::one() => {
            Extraction { weight: w, label: Some(l), residual: white_noise(), balanced: true }
        }
        Some((w, l)) => {
            let vertex = make_vertex(&kind.label(l));
            let rest = Scalar::one() - &w;
            let scale = rest.recip().expect("w < 1");
            let residual = TripartiteBox::combine(&[(&scale, p), (&(-&w * &scale), &vertex)]);
            Extraction { weight: w, label: Some(l), residual, balanced: true }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrengthReport {
    pub svetlichny_strength: Scalar,
    pub svetlichny_label: Option<[u8; 4]>,
    pub mermin_strength: Scalar,
    pub mermin_label: Option<[u8; 4]>,
    /// The box left after removing both components, renormalized.
    pub residual: TripartiteBox,
    /// Whether the residual has `G = Q = 0`.
    pub balanced: bool,
    /// The residual as a mixture of R's vertices.
    pub residual_witness: MembershipWitness,
}

pub fn strength_lp(p: &TripartiteBox) -> Result<StrengthReport, StrengthError> {
    let v = p.validate();
    if !v.is_valid() {
        return Err(StrengthError::Invalid(if !v.nonnegative {
            crate::error::BoxError::NegativeEntry(p.entries().iter().position(Scalar::is_negative).unwrap_or(0))
        } else if !v.normalized {
            crate::error::BoxError::NotNormalized
        } else {
            crate::error::BoxError::Signaling
        }));
    }
    if !lp_feasible(p, Polytope::SvetlichnyBox).feasible {
        return Err(StrengthError::NotInR);
    }
    let r: Vec<TripartiteBox> = polytope_vertices(2).iter().map(make_vertex).collect();
    let sv = extract(p, Component::Svetlichny, &r);
    let mm = extract(&sv.residual, Component::Mermin, &r);
    let mu = sv.weight;
    let nu = (Scalar::one() - &mu) * &mm.weight;
    let residual = mm.residual;
    let balanced = sv.balanced
        && mm.balanced
        && g_quantity(&residual).is_zero()
        && q_quantity(&residual).is_zero();
    let residual_witness = lp_feasible(&residual, Polytope::SvetlichnyBox);
    Ok(StrengthReport {
        svetlichny_strength: mu,
        svetlichny_label: sv.label,
        mermin_strength: nu,
        mermin_label: mm.label,
        residual,
        balanced,
        residual_witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalDecomposition {
    /// `(weight, component)` terms: a Svetlichny vertex and a Mermin box when
    /// their strengths are nonzero, then the residual.
    pub terms: Vec<(Scalar, Option<VertexLabel>, TripartiteBox)>,
}

impl CanonicalDecomposition {
    pub fn reconstruct(&self) -> TripartiteBox {
        let refs: Vec<_> = self.terms.iter().map(|(w, _, b)| (w, b)).collect();
        TripartiteBox::combine(&refs)
    }
}

pub fn canonical_decomposition(p: &TripartiteBox) -> Result<CanonicalDecomposition, StrengthError> {
    let report = strength_lp(p)?;
    if !report.balanced {
        return Err(StrengthError::NonCanonical);
    }
    let mut terms = Vec::new();
    if let Some(l) = report.svetlichny_label {
        let label = VertexLabel::Svetlichny(l);
        terms.push((report.svetlichny_strength.clone(), Some(label), make_vertex(&label)));
    }
    if let Some(l) = report.mermin_label {
        let label = VertexLabel::Mermin(l);
        terms.push((report.mermin_strength.clone(), Some(label), make_vertex(&label)));
    }
    let rest = Scalar::one() - &report.svetlichny_strength - &report.mermin_strength;
    if !rest.is_zero() {
        terms.push((rest, None, report.residual));
    }
    let d = CanonicalDecomposition { terms };
    debug_assert_eq!(d.reconstruct(), *p);
    Ok(d)
}
