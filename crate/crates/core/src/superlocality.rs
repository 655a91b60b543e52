//! Sublocal decompositions across a bipartition and superlocality certificates.
//!
//! A box is `d`-sublocal across `X|YZ` when it equals `Σ_λ p_λ X_λ ⊗ (YZ)_λ`
//! with at most `d` terms. Every such decomposition writes the 4×16 flattening
//! as a sum of `d` rank-one matrices, so a flattening rank above `d` certifies
//! superlocality.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::One;

use crate::boxes::{
    bi_index, make_vertex, mermin_family, polytope_vertices, svetlichny_family, BipartiteBox, Cut,
    SingleBox, TripartiteBox, VertexLabel, BI_LEN,
};
use crate::error::DecompositionError;
use crate::inequalities::chsh_values;
use crate::lp::{rat, LinearProgram, LpOutcome};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairClass {
    /// Nonsignaling and inside all eight CHSH facets.
    Local,
    NonSignaling,
    /// Any normalized conditional distribution.
    Unconstrained,
}

impl PairClass {
    pub fn admits(self, pair: &BipartiteBox) -> bool {
        let v = pair.validate();
        if !(v.nonnegative && v.normalized) {
            return false;
        }
        match self {
            PairClass::Unconstrained => true,
            PairClass::NonSignaling => v.nonsignaling,
            PairClass::Local => {
                v.nonsignaling && chsh_values(pair).iter().all(|s| *s <= Scalar::int(2))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub weight: Scalar,
    pub single: SingleBox,
    pub pair: BipartiteBox,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SublocalDecomposition {
    pub cut: Cut,
    pub class: PairClass,
    pub terms: Vec<Term>,
}

impl SublocalDecomposition {
    /// `d_λ`: the number of terms.
    pub fn dimension(&self) -> usize {
        self.terms.len()
    }

    pub fn reconstruct(&self) -> TripartiteBox {
        let mut entries = vec![Scalar::zero(); 64];
        for t in &self.terms {
            for row in 0..4 {
                let a = &t.single.entries()[row];
                if a.is_zero() {
                    continue;
                }
                let wa = &t.weight * a;
                for col in 0..BI_LEN {
                    let f = &t.pair.entries()[col];
                    if !f.is_zero() {
                        entries[self.cut.entry(row, col)] += &wa * f;
                    }
                }
            }
        }
        TripartiteBox::from_raw(entries).expect("64 entries")
    }

    /// Weights positive and summing to one, factors valid and in class,
    /// exact reconstruction.
    pub fn verify(&self, target: &TripartiteBox) -> bool {
        let weights_ok = self.terms.iter().all(|t| t.weight.is_positive())
            && self.terms.iter().map(|t| &t.weight).sum::<Scalar>() == Scalar::one();
        weights_ok
            && self.terms.iter().all(|t| {
                SingleBox::new(t.single.entries().clone()).is_ok() && self.class.admits(&t.pair)
            })
            && self.reconstruct() == *target
    }
}

/// Bob's and Charlie's responses in a local model of a bipartite box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteDecomposition {
    pub terms: Vec<(Scalar, SingleBox, SingleBox)>,
}

impl BipartiteDecomposition {
    pub fn dimension(&self) -> usize {
        self.terms.len()
    }

    pub fn reconstruct(&self) -> BipartiteBox {
        BipartiteBox::from_fn(|o, x| {
            self.terms
                .iter()
                .map(|(w, b, c)| w * b.get(o[0], x[0]) * c.get(o[1], x[1]))
                .sum()
        })
    }

    pub fn verify(&self, target: &BipartiteBox) -> bool {
        self.terms.iter().all(|(w, b, c)| {
            w.is_positive()
                && SingleBox::new(b.entries().clone()).is_ok()
                && SingleBox::new(c.entries().clone()).is_ok()
        }) && self.terms.iter().map(|t| &t.0).sum::<Scalar>() == Scalar::one()
            && self.reconstruct() == *target
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Sublocal,
    Superlocal,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankCertificate {
    pub rank: usize,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict<W> {
    /// `None` for a bipartite box.
    pub cut: Option<Cut>,
    pub d: usize,
    pub status: Status,
    pub witness: Option<W>,
    pub certificate: Option<RankCertificate>,
}

pub fn rank_lower_bound(b: &TripartiteBox, cut: Cut) -> usize {
    b.flatten(cut).rank()
}

/// Re-derives the flattening rank with the column-space elimination.
pub fn verify_rank_certificate(b: &TripartiteBox, cut: Cut, cert: &RankCertificate) -> bool {
    cert.rank > cert.d && b.flatten(cut).rank_by_columns() == cert.rank
}

/// Rows `(y,b)`, columns `(z,c)`.
pub fn bipartite_flatten(b: &BipartiteBox) -> Matrix {
    Matrix::from_fn(4, 4, |r, c| {
        b.entries()[bi_index([(r & 1) as u8, (c & 1) as u8], [(r >> 1) as u8, (c >> 1) as u8])].clone()
    })
}

#[derive(Clone, Copy)]
enum Shape {
    Pair(PairClass),
    Single,
}

impl Shape {
    fn cols(self) -> usize {
        match self {
            Shape::Pair(_) => BI_LEN,
            Shape::Single => 4,
        }
    }

    fn group_size(self) -> usize {
        match self {
            Shape::Pair(_) => 4,
            Shape::Single => 2,
        }
    }
}

type RawTerm = (Scalar, SingleBox, Vec<Scalar>);

fn deterministic_strategies() -> [SingleBox; 4] {
    core::array::from_fn(|s| SingleBox::deterministic((s >> 1) as u8, (s & 1) as u8))
}

fn rational(s: &Scalar) -> Option<BigRational> {
    s.is_rational().then(|| s.rational_part().clone())
}

/// Exact LP for `M = Σ_λ A_λ ⊗ F_λ` with the single-side responses `A_λ`
/// fixed and the unnormalized factors `F_λ` free within the shape's class.
/// Among feasible fits, the smallest term weight is maximized.
fn fit_factors(m: &Matrix, shape: Shape, alice: &[SingleBox]) -> Option<Vec<RawTerm>> {
    let k = alice.len();
    let fc = shape.cols();
    let coeffs: Vec<[BigRational; 4]> = alice
        .iter()
        .map(|a| {
            let mut out: [BigRational; 4] = core::array::from_fn(|_| BigRational::default());
            for (o, e) in out.iter_mut().zip(a.entries()) {
                *o = rational(e)?;
            }
            Some(out)
        })
        .collect::<Option<_>>()?;
    let local = matches!(shape, Shape::Pair(PairClass::Local));
    let ns = matches!(shape, Shape::Pair(PairClass::Local | PairClass::NonSignaling));
    let r = |l: usize, col: usize| l * fc + col;
    let p = |l: usize| k * fc + l;
    let slack = |l: usize, s: usize| k * fc + k + l * 8 + s;
    let floor = k * fc + k + if local { 8 * k } else { 0 };
    let gap = |l: usize| floor + 1 + l;
    let mut lp = LinearProgram::new(floor + 1 + k);
    #[allow(clippy::needless_range_loop)]
    for row in 0..4 {
        for col in 0..fc {
            let terms = (0..k)
                .filter(|&l| !num_traits::Zero::is_zero(&coeffs[l][row]))
                .map(|l| (r(l, col), coeffs[l][row].clone()))
                .collect();
            lp.add_row(terms, m.get(row, col).clone());
        }
    }
    let one = BigRational::one;
    for l in 0..k {
        for g in 0..fc / shape.group_size() {
            let mut row: Vec<_> = (0..shape.group_size()).map(|j| (r(l, g * shape.group_size() + j), one())).collect();
            row.push((p(l), -one()));
            lp.add_row(row, Scalar::zero());
        }
        lp.add_row(alloc::vec![(p(l), one()), (gap(l), -one()), (floor, -one())], Scalar::zero());
        if ns {
            for i in 0..2u8 {
                for o in 0..2u8 {
                    // first side's marginal at input i, output o ignores the second input
                    let mut row = Vec::new();
                    let mut col_row = Vec::new();
                    for other in 0..2u8 {
                        row.push((r(l, bi_index([o, other], [i, 0])), one()));
                        row.push((r(l, bi_index([o, other], [i, 1])), -one()));
                        col_row.push((r(l, bi_index([other, o], [0, i])), one()));
                        col_row.push((r(l, bi_index([other, o], [1, i])), -one()));
                    }
                    lp.add_row(row, Scalar::zero());
                    lp.add_row(col_row, Scalar::zero());
                }
            }
        }
        if local {
            for s in 0..8u8 {
                let (al, be, ga) = (s >> 2 & 1, s >> 1 & 1, s & 1);
                let mut row = Vec::new();
                for col in 0..BI_LEN {
                    let (o, x) = crate::boxes::bi_split(col);
                    let f = (x[0] & x[1]) ^ (al & x[0]) ^ (be & x[1]) ^ ga ^ o[0] ^ o[1];
                    row.push((r(l, col), if f == 0 { one() } else { -one() }));
                }
                row.push((p(l), rat(-2, 1)));
                row.push((slack(l, s as usize), one()));
                lp.add_row(row, Scalar::zero());
            }
        }
    }
    lp.set_objective(alloc::vec![(floor, one())]);
    let LpOutcome::Optimal { x, .. } = lp.solve() else {
        return None;
    };
    Some(
        (0..k)
            .filter(|&l| x[p(l)].is_positive())
            .map(|l| {
                let w = x[p(l)].clone();
                let factor = (0..fc).map(|col| &x[r(l, col)] / &w).collect();
                (w, alice[l].clone(), factor)
            })
            .collect(),
    )
}

/// `k`-element subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    out.sort();
    out
}

/// Set partitions of `0..n` into exactly `k` blocks.
fn partitions(n: usize, k: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(i: usize, n: usize, k: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            if cur.len() == k {
                out.push(cur.clone());
            }
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(i);
            go(i + 1, n, k, cur, out);
            cur[b].pop();
        }
        if cur.len() < k {
            cur.push(vec![i]);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Single-term fit `A ⊗ F` from the marginals.
fn product_fit(m: &Matrix, shape: Shape) -> Option<Vec<RawTerm>> {
    let fc = shape.cols();
    let gs = shape.group_size();
    let alice: [Scalar; 4] = core::array::from_fn(|row| (0..gs).map(|j| m.get(row, j).clone()).sum());
    let factor: Vec<Scalar> = (0..fc).map(|col| m.get(0, col) + m.get(1, col)).collect();
    let fits = (0..4).all(|row| (0..fc).all(|col| *m.get(row, col) == &alice[row] * &factor[col]));
    let single = SingleBox::new(alice).ok()?;
    fits.then(|| vec![(Scalar::one(), single, factor)])
}

fn search_flattening(m: &Matrix, shape: Shape, d: usize) -> Option<Vec<RawTerm>> {
    if d == 0 {
        return None;
    }
    let det = deterministic_strategies();
    let k = d.min(4);
    for s in subsets(4, k) {
        let alice: Vec<_> = s.iter().map(|&i| det[i].clone()).collect();
        if let Some(t) = fit_factors(m, shape, &alice) {
            return Some(t);
        }
    }
    if let Some(t) = product_fit(m, shape) {
        return Some(t);
    }
    if d >= 4 {
        return None;
    }
    // merge analysis: group a four-strategy witness into fewer mixed strategies
    let full = fit_factors(m, shape, &det)?;
    let witness_weights: Vec<Scalar> = (0..4)
        .map(|s| full.iter().find(|t| t.1 == det[s]).map(|t| t.0.clone()).unwrap_or_default())
        .collect();
    let uniform = vec![Scalar::one(); 4];
    for blocks in 2..=d {
        for part in partitions(4, blocks) {
            for weights in [&witness_weights, &uniform] {
                let alice: Option<Vec<SingleBox>> = part
                    .iter()
                    .map(|g| {
                        let total: Scalar = g.iter().map(|&s| &weights[s]).sum();
                        let inv = total.recip()?;
                        let scaled: Vec<Scalar> = g.iter().map(|&s| &weights[s] * &inv).collect();
                        let terms: Vec<_> = scaled.iter().zip(g.iter().map(|&s| &det[s])).collect();
                        Some(SingleBox::combine(&terms))
                    })
                    .collect();
                if let Some(t) = alice.and_then(|a| fit_factors(m, shape, &a)) {
                    return Some(t);
                }
            }
        }
    }
    None
}

/// Exhaustive over deterministic single-side strategies, then a product
/// check, then the merge analysis. Every returned witness is verified.
pub fn search_decomposition(
    b: &TripartiteBox,
    cut: Cut,
    d: usize,
    class: PairClass,
) -> Option<SublocalDecomposition> {
    let raw = search_flattening(&b.flatten(cut), Shape::Pair(class), d)?;
    let terms = raw
        .into_iter()
        .map(|(weight, single, f)| Term { weight, single, pair: BipartiteBox::from_raw(f).expect("16 entries") })
        .collect();
    let w = SublocalDecomposition { cut, class, terms };
    (w.dimension() <= d && w.verify(b)).then_some(w)
}

fn check_exclusion(rank: usize, witness_dim: usize) {
    assert!(
        rank <= witness_dim,
        "a verified {witness_dim}-term witness contradicts flattening rank {rank}"
    );
}

pub fn superlocality_verdict(b: &TripartiteBox, cut: Cut, d: usize) -> Verdict<SublocalDecomposition> {
    let rank = rank_lower_bound(b, cut);
    let mut v = Verdict { cut: Some(cut), d, status: Status::Unknown, witness: None, certificate: None };
    if rank > d {
        v.status = Status::Superlocal;
        v.certificate = Some(RankCertificate { rank, d });
    } else if let Some(w) = search_decomposition(b, cut, d, PairClass::NonSignaling) {
        check_exclusion(rank, w.dimension());
        v.status = Status::Sublocal;
        v.witness = Some(w);
    }
    v
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenuineReport {
    pub d: usize,
    /// Cuts `A|BC`, `B|AC`, `C|AB` in order.
    pub verdicts: Vec<Verdict<SublocalDecomposition>>,
    pub genuine: bool,
    pub absolute: bool,
}

pub fn genuine_report(b: &TripartiteBox, d: usize) -> GenuineReport {
    let verdicts: Vec<_> = Cut::ALL.iter().map(|&c| superlocality_verdict(b, c, d)).collect();
    let genuine = verdicts.iter().all(|v| v.status == Status::Superlocal);
    let absolute = verdicts.iter().any(|v| v.status == Status::Superlocal);
    GenuineReport { d, verdicts, genuine, absolute }
}

pub fn verify_verdict(b: &TripartiteBox, v: &Verdict<SublocalDecomposition>) -> bool {
    let Some(cut) = v.cut else {
        return false;
    };
    match v.status {
        Status::Superlocal => v
            .certificate
            .as_ref()
            .is_some_and(|c| c.d == v.d && verify_rank_certificate(b, cut, c)),
        Status::Sublocal => v
            .witness
            .as_ref()
            .is_some_and(|w| w.cut == cut && w.dimension() <= v.d && w.verify(b)),
        Status::Unknown => v.witness.is_none() && v.certificate.is_none(),
    }
}

pub fn bipartite_verdict(b: &BipartiteBox, d: usize) -> Verdict<BipartiteDecomposition> {
    let m = bipartite_flatten(b);
    let rank = m.rank();
    let mut v = Verdict { cut: None, d, status: Status::Unknown, witness: None, certificate: None };
    if rank > d {
        v.status = Status::Superlocal;
        v.certificate = Some(RankCertificate { rank, d });
        return v;
    }
    let found = search_flattening(&m, Shape::Single, d).map(|raw| BipartiteDecomposition {
        terms: raw
            .into_iter()
            .map(|(w, bob, f)| {
                let charlie = SingleBox::new(core::array::from_fn(|i| f[i].clone())).expect("normalized factor");
                (w, bob, charlie)
            })
            .collect(),
    });
    if let Some(w) = found.filter(|w| w.dimension() <= d && w.verify(b)) {
        check_exclusion(rank, w.dimension());
        v.status = Status::Sublocal;
        v.witness = Some(w);
    }
    v
}

pub fn verify_bipartite_verdict(b: &BipartiteBox, v: &Verdict<BipartiteDecomposition>) -> bool {
    match v.status {
        Status::Superlocal => v.certificate.as_ref().is_some_and(|c| {
            c.d == v.d && c.rank > c.d && bipartite_flatten(b).rank_by_columns() == c.rank
        }),
        Status::Sublocal => v.witness.as_ref().is_some_and(|w| w.dimension() <= v.d && w.verify(b)),
        Status::Unknown => v.witness.is_none() && v.certificate.is_none(),
    }
}

/// A fully product-form model with at most two terms, each a deterministic
/// vertex; `d` must be 1 or 2.
pub fn fully_sublocal_search(b: &TripartiteBox, d: usize) -> Option<Vec<(Scalar, VertexLabel)>> {
    let labels = polytope_vertices(0);
    let boxes: Vec<_> = labels.iter().map(make_vertex).collect();
    if let Some(i) = boxes.iter().position(|v| v == b) {
        return Some(vec![(Scalar::one(), labels[i])]);
    }
    if d < 2 {
        return None;
    }
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            // the weight of box i is read off any entry where the two differ
            let Some(k) = (0..64).find(|&k| boxes[i].entries()[k] != boxes[j].entries()[k]) else {
                continue;
            };
            let w = if boxes[i].entries()[k] == Scalar::one() {
                b.entries()[k].clone()
            } else {
                Scalar::one() - &b.entries()[k]
            };
            if !w.is_positive() || w >= Scalar::one() {
                continue;
            }
            let rest = Scalar::one() - &w;
            if TripartiteBox::combine(&[(&w, &boxes[i]), (&rest, &boxes[j])]) == *b {
                return Some(vec![(w, labels[i]), (rest, labels[j])]);
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AppendixKind {
    /// Svetlichny family, local pair factors, `μ ≤ 1/√2`.
    SvfA,
    /// Mermin family, local pair factors, `ν ≤ 1/2`.
    MfC,
    /// Mermin family, noisy PR-box pair factors, `ν ≤ 1`.
    MfD,
}

fn row(pattern: [u8; 4], hi: &Scalar, lo: &Scalar) -> [Scalar; 4] {
    core::array::from_fn(|i| if pattern[i] == 1 { hi.clone() } else { lo.clone() })
}

/// The explicit four-term classical simulations across `A|BC`, with Alice
/// playing `a = αx⊕β` for `λ = (α,β)` with probability ¼ each.
pub fn appendix_decomposition(
    kind: AppendixKind,
    param: &Scalar,
) -> Result<SublocalDecomposition, DecompositionError> {
    let limit = match kind {
        AppendixKind::SvfA => Scalar::inv_sqrt2(),
        AppendixKind::MfC => Scalar::ratio(1, 2),
        AppendixKind::MfD => Scalar::one(),
    };
    if !param.is_positive() || *param > limit {
        return Err(DecompositionError::ParameterOutOfRange);
    }
    let quarter = Scalar::ratio(1, 4);
    let det = deterministic_strategies();
    let (pairs, class): (Vec<BipartiteBox>, _) = match kind {
        AppendixKind::SvfA | AppendixKind::MfC => {
            let dev = match kind {
                AppendixKind::SvfA => param * &Scalar::sqrt2(),
                _ => param.clone(),
            };
            let p = (Scalar::one() + &dev) * &quarter;
            let m = (Scalar::one() - &dev) * &quarter;
            let even = row([1, 0, 0, 1], &p, &m);
            let odd = row([0, 1, 1, 0], &p, &m);
            let flat = row([1, 1, 1, 1], &quarter, &quarter);
            let tables: [[&[Scalar; 4]; 4]; 4] = match kind {
                AppendixKind::SvfA => [
                    [&even, &flat, &flat, &odd],
                    [&odd, &flat, &flat, &even],
                    [&flat, &even, &even, &flat],
                    [&flat, &odd, &odd, &flat],
                ],
                _ => [
                    [&even, &even, &even, &odd],
                    [&odd, &odd, &odd, &even],
                    [&odd, &even, &even, &even],
                    [&even, &odd, &odd, &odd],
                ],
            };
            let pairs = tables
                .iter()
                .map(|t| BipartiteBox::from_rows(core::array::from_fn(|i| t[i].clone())))
                .collect();
            (pairs, PairClass::Local)
        }
        AppendixKind::MfD => {
            let noise = Scalar::one() - param;
            let pairs = [(0, 0, 0), (0, 0, 1), (1, 1, 1), (1, 1, 0)]
                .iter()
                .map(|&(a, b, c)| {
                    BipartiteBox::combine(&[(param, &BipartiteBox::pr(a, b, c)), (&noise, &BipartiteBox::uniform())])
                })
                .collect();
            (pairs, PairClass::NonSignaling)
        }
    };
    let terms = det
        .into_iter()
        .zip(pairs)
        .map(|(single, pair)| Term { weight: quarter.clone(), single, pair })
        .collect();
    Ok(SublocalDecomposition { cut: Cut::A, class, terms })
}

/// The family box an appendix decomposition simulates.
pub fn appendix_target(kind: AppendixKind, param: &Scalar) -> Result<TripartiteBox, DecompositionError> {
    match kind {
        AppendixKind::SvfA => svetlichny_family(param),
        AppendixKind::MfC | AppendixKind::MfD => mermin_family(param),
    }
    .map_err(|_| DecompositionError::ParameterOutOfRange)
}
