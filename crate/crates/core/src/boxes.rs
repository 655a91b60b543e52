//! Boxes, their vertices and named families.
//!
//! Entry layout: a tripartite box stores `P(abc|xyz)` at
//! `((x·2+y)·2+z)·8 + (a·4+b·2+c)`; a bipartite box stores `P(bc|yz)` at
//! `(y·2+z)·4 + (b·2+c)`; a single-party box stores `P(a|x)` at `x·2+a`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::BoxError;
use crate::scalar::Scalar;

pub const TRI_LEN: usize = 64;
pub const BI_LEN: usize = 16;

#[inline]
pub fn tri_index(outputs: [u8; 3], inputs: [u8; 3]) -> usize {
    let i = (inputs[0] as usize) << 2 | (inputs[1] as usize) << 1 | inputs[2] as usize;
    let o = (outputs[0] as usize) << 2 | (outputs[1] as usize) << 1 | outputs[2] as usize;
    i << 3 | o
}

/// Inverse of [`tri_index`]: `(outputs, inputs)`.
#[inline]
pub fn tri_split(index: usize) -> ([u8; 3], [u8; 3]) {
    let bits = |v: usize| [(v >> 2 & 1) as u8, (v >> 1 & 1) as u8, (v & 1) as u8];
    (bits(index & 7), bits(index >> 3))
}

#[inline]
pub fn bi_index(outputs: [u8; 2], inputs: [u8; 2]) -> usize {
    ((inputs[0] as usize) << 1 | inputs[1] as usize) << 2
        | ((outputs[0] as usize) << 1 | outputs[1] as usize)
}

#[inline]
pub fn bi_split(index: usize) -> ([u8; 2], [u8; 2]) {
    let o = index & 3;
    let i = index >> 2;
    ([(o >> 1) as u8, (o & 1) as u8], [(i >> 1) as u8, (i & 1) as u8])
}

fn sign(bit: u8) -> i64 {
    if bit & 1 == 0 {
        1
    } else {
        -1
    }
}

fn scaled(s: &Scalar, k: i64) -> Scalar {
    match k {
        1 => s.clone(),
        -1 => -s,
        0 => Scalar::zero(),
        _ => s * &Scalar::int(k),
    }
}

fn check_entries(entries: &[Scalar]) -> Option<usize> {
    entries.iter().position(|e| e.is_negative())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    A,
    B,
    C,
}

impl Party {
    pub const ALL: [Party; 3] = [Party::A, Party::B, Party::C];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Two parties grouped together; the remaining party is `lone()`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pairing {
    AB,
    AC,
    BC,
}

impl Pairing {
    pub const ALL: [Pairing; 3] = [Pairing::AB, Pairing::AC, Pairing::BC];

    pub fn parties(self) -> (Party, Party) {
        match self {
            Pairing::AB => (Party::A, Party::B),
            Pairing::AC => (Party::A, Party::C),
            Pairing::BC => (Party::B, Party::C),
        }
    }

    pub fn lone(self) -> Party {
        match self {
            Pairing::AB => Party::C,
            Pairing::AC => Party::B,
            Pairing::BC => Party::A,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Pairing::AB => "12",
            Pairing::AC => "13",
            Pairing::BC => "23",
        }
    }
}

/// A bipartition `X|YZ`, named by the party standing alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cut {
    A,
    B,
    C,
}

impl Cut {
    pub const ALL: [Cut; 3] = [Cut::A, Cut::B, Cut::C];

    pub fn single(self) -> Party {
        match self {
            Cut::A => Party::A,
            Cut::B => Party::B,
            Cut::C => Party::C,
        }
    }

    pub fn pairing(self) -> Pairing {
        match self {
            Cut::A => Pairing::BC,
            Cut::B => Pairing::AC,
            Cut::C => Pairing::AB,
        }
    }

    /// Tripartite entry index of flattening cell `(row, col)`, where
    /// `row = x_s·2 + a_s` and `col = (i·2+j)·4 + (k·2+l)` for the pair.
    pub fn entry(self, row: usize, col: usize) -> usize {
        let s = self.single().index();
        let (p, q) = self.pairing().parties();
        let (po, pi) = bi_split(col);
        let mut inputs = [0u8; 3];
        let mut outputs = [0u8; 3];
        inputs[s] = (row >> 1) as u8;
        outputs[s] = (row & 1) as u8;
        inputs[p.index()] = pi[0];
        inputs[q.index()] = pi[1];
        outputs[p.index()] = po[0];
        outputs[q.index()] = po[1];
        tri_index(outputs, inputs)
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cut::A => "A|BC",
            Cut::B => "B|AC",
            Cut::C => "C|AB",
        })
    }
}

impl FromStr for Cut {
    type Err = BoxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A|BC" | "A" => Ok(Cut::A),
            "B|AC" | "B" => Ok(Cut::B),
            "C|AB" | "C" => Ok(Cut::C),
            _ => Err(BoxError::BadLabel(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Validation {
    pub nonnegative: bool,
    pub normalized: bool,
    pub nonsignaling: bool,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.nonnegative && self.normalized && self.nonsignaling
    }

    fn into_result(self, entries: &[Scalar]) -> Result<(), BoxError> {
        if let Some(i) = check_entries(entries) {
            return Err(BoxError::NegativeEntry(i));
        }
        if !self.normalized {
            return Err(BoxError::NotNormalized);
        }
        if !self.nonsignaling {
            return Err(BoxError::Signaling);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TripartiteBox {
    entries: Vec<Scalar>,
}

impl TripartiteBox {
    /// Validating constructor.
    pub fn new(entries: Vec<Scalar>) -> Result<Self, BoxError> {
        let b = TripartiteBox::from_raw(entries)?;
        b.validate().into_result(&b.entries)?;
        Ok(b)
    }

    /// Checks only the length; the result may be unnormalized, negative or signaling.
    pub fn from_raw(entries: Vec<Scalar>) -> Result<Self, BoxError> {
        if entries.len() != TRI_LEN {
            return Err(BoxError::WrongLength { expected: TRI_LEN, got: entries.len() });
        }
        Ok(TripartiteBox { entries })
    }

    pub fn from_fn(mut f: impl FnMut([u8; 3], [u8; 3]) -> Scalar) -> Self {
        let entries = (0..TRI_LEN)
            .map(|i| {
                let (o, x) = tri_split(i);
                f(o, x)
            })
            .collect();
        TripartiteBox { entries }
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn get(&self, outputs: [u8; 3], inputs: [u8; 3]) -> &Scalar {
        &self.entries[tri_index(outputs, inputs)]
    }

    pub fn validate(&self) -> Validation {
        let nonnegative = check_entries(&self.entries).is_none();
        let one = Scalar::one();
        let normalized = (0..8).all(|i| {
            let s: Scalar = self.entries[i * 8..i * 8 + 8].iter().sum();
            s == one
        });
        let nonsignaling = Party::ALL.iter().all(|&k| self.independent_of(k));
        Validation { nonnegative, normalized, nonsignaling }
    }

    /// Whether the joint marginal of the other two parties ignores `party`'s input.
    fn independent_of(&self, party: Party) -> bool {
        let k = party.index();
        (0..TRI_LEN).filter(|&i| {
            let (o, x) = tri_split(i);
            o[k] == 0 && x[k] == 0
        })
        .all(|i| {
            let (mut o, mut x) = tri_split(i);
            let mut sums = [Scalar::zero(), Scalar::zero()];
            for (xi, sum) in sums.iter_mut().enumerate() {
                x[k] = xi as u8;
                for ok in 0..2 {
                    o[k] = ok;
                    *sum += &self.entries[tri_index(o, x)];
                }
            }
            sums[0] == sums[1]
        })
    }

    /// Expectation of the product of `(−1)^output` over the parties in `mask`
    /// (bit 2 = A, bit 1 = B, bit 0 = C), at the given inputs.
    pub fn expectation(&self, mask: u8, inputs: [u8; 3]) -> Scalar {
        let mut plus = Scalar::zero();
        let mut minus = Scalar::zero();
        for o in 0..8usize {
            let e = &self.entries[tri_index([0; 3], inputs) + o];
            if e.is_zero() {
                continue;
            }
            if (o as u8 & mask).count_ones().is_multiple_of(2) {
                plus += e;
            } else {
                minus += e;
            }
        }
        plus - minus
    }

    pub fn correlators(&self) -> Correlators {
        let mut c = Correlators::zero();
        for x in 0..2u8 {
            c.singles[x as usize] = self.expectation(0b100, [x, 0, 0]);
            c.singles[2 + x as usize] = self.expectation(0b010, [0, x, 0]);
            c.singles[4 + x as usize] = self.expectation(0b001, [0, 0, x]);
        }
        for i in 0..2u8 {
            for j in 0..2u8 {
                let k = (i * 2 + j) as usize;
                c.pairs[k] = self.expectation(0b110, [i, j, 0]);
                c.pairs[4 + k] = self.expectation(0b101, [i, 0, j]);
                c.pairs[8 + k] = self.expectation(0b011, [0, i, j]);
            }
        }
        for (t, triple) in c.triples.iter_mut().enumerate() {
            let (_, x) = tri_split(t << 3);
            *triple = self.expectation(0b111, x);
        }
        c
    }

    /// Two-party marginal; fails if it depends on the third party's input.
    pub fn marginal_pair(&self, pairing: Pairing) -> Result<BipartiteBox, BoxError> {
        let (p, q) = pairing.parties();
        let r = pairing.lone().index();
        let mut out: Option<Vec<Scalar>> = None;
        for xr in 0..2u8 {
            let entries: Vec<Scalar> = (0..BI_LEN)
                .map(|col| {
                    let (po, pi) = bi_split(col);
                    let mut inputs = [0u8; 3];
                    let mut outputs = [0u8; 3];
                    inputs[p.index()] = pi[0];
                    inputs[q.index()] = pi[1];
                    inputs[r] = xr;
                    outputs[p.index()] = po[0];
                    outputs[q.index()] = po[1];
                    (0..2u8)
                        .map(|or| {
                            outputs[r] = or;
                            self.entries[tri_index(outputs, inputs)].clone()
                        })
                        .sum()
                })
                .collect();
            match &out {
                None => out = Some(entries),
                Some(prev) if *prev != entries => return Err(BoxError::Signaling),
                _ => {}
            }
        }
        Ok(BipartiteBox { entries: out.unwrap_or_default() })
    }

    pub fn marginal_single(&self, party: Party) -> Result<SingleBox, BoxError> {
        let pairing = match party {
            Party::A => Pairing::AB,
            Party::B => Pairing::BC,
            Party::C => Pairing::BC,
        };
        let pair = self.marginal_pair(pairing)?;
        let first = pairing.parties().0 == party;
        pair.marginal(if first { 0 } else { 1 })
    }

    /// Rows `(x_s, a_s)` of the singled-out party, columns the pair's `(inputs, outputs)`.
    pub fn flatten(&self, cut: Cut) -> crate::matrix::Matrix {
        crate::matrix::Matrix::from_fn(4, BI_LEN, |r, c| self.entries[cut.entry(r, c)].clone())
    }

    /// Sum of `weight_i · box_i`, unchecked.
    pub fn combine(terms: &[(&Scalar, &TripartiteBox)]) -> TripartiteBox {
        let mut entries = vec![Scalar::zero(); TRI_LEN];
        for (w, b) in terms {
            if w.is_zero() {
                continue;
            }
            for (e, v) in entries.iter_mut().zip(&b.entries) {
                if !v.is_zero() {
                    *e += &(*w * v);
                }
            }
        }
        TripartiteBox { entries }
    }
}

/// The 26 signed expectations of a three-party box.
///
/// `singles`: A0 A1 B0 B1 C0 C1. `pairs`: AB at `x·2+y`, AC at `4+x·2+z`,
/// BC at `8+y·2+z`. `triples`: ABC at `x·4+y·2+z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correlators {
    pub singles: [Scalar; 6],
    pub pairs: [Scalar; 12],
    pub triples: [Scalar; 8],
}

impl Correlators {
    pub fn zero() -> Self {
        Correlators {
            singles: core::array::from_fn(|_| Scalar::zero()),
            pairs: core::array::from_fn(|_| Scalar::zero()),
            triples: core::array::from_fn(|_| Scalar::zero()),
        }
    }
}

/// Inverse of [`TripartiteBox::correlators`]. Fails only on negative entries.
pub fn from_correlators(c: &Correlators) -> Result<TripartiteBox, BoxError> {
    let eighth = Scalar::ratio(1, 8);
    let b = TripartiteBox::from_fn(|o, x| {
        let mut s = Scalar::one();
        s += scaled(&c.singles[x[0] as usize], sign(o[0]));
        s += scaled(&c.singles[2 + x[1] as usize], sign(o[1]));
        s += scaled(&c.singles[4 + x[2] as usize], sign(o[2]));
        s += scaled(&c.pairs[(x[0] * 2 + x[1]) as usize], sign(o[0] ^ o[1]));
        s += scaled(&c.pairs[4 + (x[0] * 2 + x[2]) as usize], sign(o[0] ^ o[2]));
        s += scaled(&c.pairs[8 + (x[1] * 2 + x[2]) as usize], sign(o[1] ^ o[2]));
        s += scaled(&c.triples[(x[0] * 4 + x[1] * 2 + x[2]) as usize], sign(o[0] ^ o[1] ^ o[2]));
        s * &eighth
    });
    match check_entries(&b.entries) {
        Some(i) => Err(BoxError::NegativeEntry(i)),
        None => Ok(b),
    }
}

pub fn mix(boxes: &[TripartiteBox], weights: &[Scalar]) -> Result<TripartiteBox, BoxError> {
    check_weights(boxes.len(), weights)?;
    let terms: Vec<_> = weights.iter().zip(boxes).collect();
    Ok(TripartiteBox::combine(&terms))
}

fn check_weights(n: usize, weights: &[Scalar]) -> Result<(), BoxError> {
    if n != weights.len() {
        return Err(BoxError::LengthMismatch);
    }
    if weights.iter().any(Scalar::is_negative) {
        return Err(BoxError::NegativeWeight);
    }
    if weights.iter().sum::<Scalar>() != Scalar::one() {
        return Err(BoxError::WeightsDoNotSumToOne);
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteBox {
    entries: Vec<Scalar>,
}

impl BipartiteBox {
    pub fn new(entries: Vec<Scalar>) -> Result<Self, BoxError> {
        let b = BipartiteBox::from_raw(entries)?;
        b.validate().into_result(&b.entries)?;
        Ok(b)
    }

    pub fn from_raw(entries: Vec<Scalar>) -> Result<Self, BoxError> {
        if entries.len() != BI_LEN {
            return Err(BoxError::WrongLength { expected: BI_LEN, got: entries.len() });
        }
        Ok(BipartiteBox { entries })
    }

    pub fn from_fn(mut f: impl FnMut([u8; 2], [u8; 2]) -> Scalar) -> Self {
        let entries = (0..BI_LEN)
            .map(|i| {
                let (o, x) = bi_split(i);
                f(o, x)
            })
            .collect();
        BipartiteBox { entries }
    }

    /// `(1/4)·[[r0],[r1],[r2],[r3]]`-style construction: rows are input pairs, columns outputs.
    pub fn from_rows(rows: [[Scalar; 4]; 4]) -> Self {
        BipartiteBox { entries: rows.into_iter().flatten().collect() }
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn get(&self, outputs: [u8; 2], inputs: [u8; 2]) -> &Scalar {
        &self.entries[bi_index(outputs, inputs)]
    }

    pub fn validate(&self) -> Validation {
        let nonnegative = check_entries(&self.entries).is_none();
        let one = Scalar::one();
        let normalized = (0..4).all(|i| self.entries[i * 4..i * 4 + 4].iter().sum::<Scalar>() == one);
        Validation { nonnegative, normalized, nonsignaling: self.is_nonsignaling() }
    }

    pub fn is_nonsignaling(&self) -> bool {
        self.side_marginals(0).is_some() && self.side_marginals(1).is_some()
    }

    /// Marginal of side `k` (0 or 1), if independent of the other side's input.
    fn side_marginals(&self, k: usize) -> Option<[Scalar; 4]> {
        let mut m: [Scalar; 4] = core::array::from_fn(|_| Scalar::zero());
        for xk in 0..2u8 {
            for ok in 0..2u8 {
                let mut vals = [Scalar::zero(), Scalar::zero()];
                for (xo, v) in vals.iter_mut().enumerate() {
                    for oo in 0..2u8 {
                        let (o, x) = if k == 0 {
                            ([ok, oo], [xk, xo as u8])
                        } else {
                            ([oo, ok], [xo as u8, xk])
                        };
                        *v += self.get(o, x);
                    }
                }
                if vals[0] != vals[1] {
                    return None;
                }
                let [v0, _] = vals;
                m[(xk * 2 + ok) as usize] = v0;
            }
        }
        Some(m)
    }

    pub fn marginal(&self, side: usize) -> Result<SingleBox, BoxError> {
        self.side_marginals(side)
            .map(|entries| SingleBox { entries })
            .ok_or(BoxError::Signaling)
    }

    /// `E_ij = Σ (−1)^{k⊕l} P(kl|ij)`.
    pub fn correlator(&self, i: u8, j: u8) -> Scalar {
        let base = bi_index([0, 0], [i, j]);
        let e = &self.entries[base..base + 4];
        &e[0] - &e[1] - &e[2] + &e[3]
    }

    /// `PR^{αβγ}`: `½` when `k⊕l = ij⊕αi⊕βj⊕γ`.
    pub fn pr(alpha: u8, beta: u8, gamma: u8) -> Self {
        let half = Scalar::ratio(1, 2);
        BipartiteBox::from_fn(|o, x| {
            if o[0] ^ o[1] == (x[0] & x[1]) ^ (alpha & x[0]) ^ (beta & x[1]) ^ gamma {
                half.clone()
            } else {
                Scalar::zero()
            }
        })
    }

    pub fn uniform() -> Self {
        BipartiteBox { entries: vec![Scalar::ratio(1, 4); BI_LEN] }
    }

    pub fn combine(terms: &[(&Scalar, &BipartiteBox)]) -> BipartiteBox {
        let mut entries = vec![Scalar::zero(); BI_LEN];
        for (w, b) in terms {
            for (e, v) in entries.iter_mut().zip(&b.entries) {
                *e += &(*w * v);
            }
        }
        BipartiteBox { entries }
    }

    pub fn relabel(&self, r: &Relabeling) -> BipartiteBox {
        BipartiteBox::from_fn(|o, x| {
            let src_x = [x[0] ^ r.input_flip[0], x[1] ^ r.input_flip[1]];
            let src_o = [
                o[0] ^ (r.output_slope[0] & x[0]) ^ r.output_flip[0],
                o[1] ^ (r.output_slope[1] & x[1]) ^ r.output_flip[1],
            ];
            self.get(src_o, src_x).clone()
        })
    }

    /// First local reversible relabeling mapping `self` onto `other`, if any.
    pub fn equivalent_to(&self, other: &BipartiteBox) -> Option<Relabeling> {
        Relabeling::all().find(|r| self.relabel(r) == *other)
    }
}

/// Input flips plus input-dependent output flips on each side: 64 in total.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Relabeling {
    pub input_flip: [u8; 2],
    pub output_slope: [u8; 2],
    pub output_flip: [u8; 2],
}

impl Relabeling {
    pub fn all() -> impl Iterator<Item = Relabeling> {
        (0..64u8).map(|m| Relabeling {
            input_flip: [m >> 5 & 1, m >> 4 & 1],
            output_slope: [m >> 3 & 1, m >> 2 & 1],
            output_flip: [m >> 1 & 1, m & 1],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SingleBox {
    entries: [Scalar; 4],
}

impl SingleBox {
    pub fn new(entries: [Scalar; 4]) -> Result<Self, BoxError> {
        if let Some(i) = check_entries(&entries) {
            return Err(BoxError::NegativeEntry(i));
        }
        let one = Scalar::one();
        if &entries[0] + &entries[1] != one || &entries[2] + &entries[3] != one {
            return Err(BoxError::NotNormalized);
        }
        Ok(SingleBox { entries })
    }

    /// `a = αx ⊕ β`.
    pub fn deterministic(alpha: u8, beta: u8) -> Self {
        SingleBox {
            entries: core::array::from_fn(|i| {
                let (x, a) = ((i >> 1) as u8, (i & 1) as u8);
                if a == (alpha & x) ^ beta {
                    Scalar::one()
                } else {
                    Scalar::zero()
                }
            }),
        }
    }

    pub fn entries(&self) -> &[Scalar; 4] {
        &self.entries
    }

    pub fn get(&self, output: u8, input: u8) -> &Scalar {
        &self.entries[(input * 2 + output) as usize]
    }

    pub fn combine(terms: &[(&Scalar, &SingleBox)]) -> SingleBox {
        let mut entries: [Scalar; 4] = core::array::from_fn(|_| Scalar::zero());
        for (w, b) in terms {
            for (e, v) in entries.iter_mut().zip(&b.entries) {
                *e += &(*w * v);
            }
        }
        SingleBox { entries }
    }
}

/// Extremal boxes of the local, two-local and Svetlichny-box polytopes, plus
/// the Mermin boxes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexLabel {
    /// `[α,β,γ,ε,ζ,η]`: `a = αx⊕β`, `b = γy⊕ε`, `c = ζz⊕η`.
    Deterministic([u8; 6]),
    /// `[α,β,γ,ζ,ε]`: a PR box on the pair (`k⊕l = ij⊕αi⊕βj⊕γ`) and the lone
    /// party answering `ζ·input ⊕ ε`.
    TwoLocal { pairing: Pairing, bits: [u8; 5] },
    /// `[α,β,γ,ε]`: `¼` when `a⊕b⊕c = xy⊕xz⊕yz⊕αx⊕βy⊕γz⊕ε`.
    Svetlichny([u8; 4]),
    /// The box attaining the maximum of the Mermin functional with the same label.
    Mermin([u8; 4]),
}

fn bits_of<const N: usize>(v: usize) -> [u8; N] {
    core::array::from_fn(|i| (v >> (N - 1 - i) & 1) as u8)
}

impl VertexLabel {
    pub fn deterministic_all() -> impl Iterator<Item = VertexLabel> {
        (0..64).map(|v| VertexLabel::Deterministic(bits_of(v)))
    }

    pub fn two_local_all() -> impl Iterator<Item = VertexLabel> {
        Pairing::ALL
            .into_iter()
            .flat_map(|pairing| (0..32).map(move |v| VertexLabel::TwoLocal { pairing, bits: bits_of(v) }))
    }

    pub fn svetlichny_all() -> impl Iterator<Item = VertexLabel> {
        (0..16).map(|v| VertexLabel::Svetlichny(bits_of(v)))
    }

    pub fn mermin_all() -> impl Iterator<Item = VertexLabel> {
        (0..16).map(|v| VertexLabel::Mermin(bits_of(v)))
    }
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = |b: &[u8]| b.iter().map(|d| char::from(b'0' + d)).collect::<String>();
        match self {
            VertexLabel::Deterministic(b) => write!(f, "D:{}", digits(b)),
            VertexLabel::TwoLocal { pairing, bits } => {
                write!(f, "T{}:{}", pairing.tag(), digits(bits))
            }
            VertexLabel::Svetlichny(b) => write!(f, "S:{}", digits(b)),
            VertexLabel::Mermin(b) => write!(f, "M:{}", digits(b)),
        }
    }
}

impl FromStr for VertexLabel {
    type Err = BoxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BoxError::BadLabel(s.to_string());
        let (tag, digits) = s.split_once(':').ok_or_else(bad)?;
        let bits: Vec<u8> = digits
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(bad()),
            })
            .collect::<Result<_, _>>()?;
        let fixed = |n: usize| if bits.len() == n { Ok(()) } else { Err(bad()) };
        match tag {
            "D" => {
                fixed(6)?;
                Ok(VertexLabel::Deterministic(core::array::from_fn(|i| bits[i])))
            }
            "S" | "M" => {
                fixed(4)?;
                let b = core::array::from_fn(|i| bits[i]);
                Ok(if tag == "S" { VertexLabel::Svetlichny(b) } else { VertexLabel::Mermin(b) })
            }
            _ => {
                fixed(5)?;
                let pairing = match tag {
                    "T12" => Pairing::AB,
                    "T13" => Pairing::AC,
                    "T23" => Pairing::BC,
                    _ => return Err(bad()),
                };
                Ok(VertexLabel::TwoLocal { pairing, bits: core::array::from_fn(|i| bits[i]) })
            }
        }
    }
}

pub fn make_vertex(label: &VertexLabel) -> TripartiteBox {
    let one = Scalar::one();
    let indicator = |cond: bool, v: &Scalar| if cond { v.clone() } else { Scalar::zero() };
    match *label {
        VertexLabel::Deterministic([al, be, ga, ep, ze, et]) => TripartiteBox::from_fn(|o, x| {
            let ok = o[0] == (al & x[0]) ^ be && o[1] == (ga & x[1]) ^ ep && o[2] == (ze & x[2]) ^ et;
            indicator(ok, &one)
        }),
        VertexLabel::TwoLocal { pairing, bits: [al, be, ga, ze, ep] } => {
            let half = Scalar::ratio(1, 2);
            let (p, q) = pairing.parties();
            let r = pairing.lone().index();
            let (p, q) = (p.index(), q.index());
            TripartiteBox::from_fn(|o, x| {
                let pr = o[p] ^ o[q] == (x[p] & x[q]) ^ (al & x[p]) ^ (be & x[q]) ^ ga;
                let det = o[r] == (ze & x[r]) ^ ep;
                indicator(pr && det, &half)
            })
        }
        VertexLabel::Svetlichny([al, be, ga, ep]) => {
            let quarter = Scalar::ratio(1, 4);
            TripartiteBox::from_fn(|o, x| {
                let f = (x[0] & x[1]) ^ (x[0] & x[2]) ^ (x[1] & x[2])
                    ^ (al & x[0]) ^ (be & x[1]) ^ (ga & x[2]) ^ ep;
                indicator(o[0] ^ o[1] ^ o[2] == f, &quarter)
            })
        }
        VertexLabel::Mermin(l) => {
            let coeffs = crate::inequalities::mermin_coefficients(l);
            let mut c = Correlators::zero();
            for (t, k) in c.triples.iter_mut().zip(coeffs) {
                *t = Scalar::int(k as i64);
            }
            from_correlators(&c).expect("Mermin boxes are nonnegative")
        }
    }
}

/// Deterministic vertices (L), then two-local (L2), then Svetlichny (R).
pub fn polytope_vertices(level: usize) -> Vec<VertexLabel> {
    let mut v: Vec<VertexLabel> = VertexLabel::deterministic_all().collect();
    if level >= 1 {
        v.extend(VertexLabel::two_local_all());
    }
    if level >= 2 {
        v.extend(VertexLabel::svetlichny_all());
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `SvF(μ)`, Svetlichny strength μ/√2 in the canonical decomposition.
    Svetlichny,
    /// `MF(ν)`.
    Mermin,
    WhiteNoise,
    /// Bipartite `(1 + (−1)^{b⊕c⊕yz} δ_{y,z} V)/4`.
    Bb84,
    /// Bipartite `(2 + (−1)^{b⊕c⊕yz} √2 V)/8`.
    Chsh,
}

impl FromStr for Family {
    type Err = BoxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "svf" | "svetlichny" => Ok(Family::Svetlichny),
            "mf" | "mermin" => Ok(Family::Mermin),
            "white" | "whitenoise" | "noise" => Ok(Family::WhiteNoise),
            "bb84" => Ok(Family::Bb84),
            "chsh" | "chshfam" => Ok(Family::Chsh),
            _ => Err(BoxError::BadLabel(format!("family {s}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyBox {
    Tripartite(TripartiteBox),
    Bipartite(BipartiteBox),
}

fn unit_param(param: Option<&Scalar>) -> Result<&Scalar, BoxError> {
    let p = param.ok_or(BoxError::MissingParameter)?;
    if !p.is_positive() || *p > Scalar::one() {
        return Err(BoxError::ParameterOutOfRange);
    }
    Ok(p)
}

pub fn make_family(family: Family, param: Option<&Scalar>) -> Result<AnyBox, BoxError> {
    Ok(match family {
        Family::Svetlichny => AnyBox::Tripartite(svetlichny_family(unit_param(param)?)?),
        Family::Mermin => AnyBox::Tripartite(mermin_family(unit_param(param)?)?),
        Family::WhiteNoise => AnyBox::Tripartite(white_noise()),
        Family::Bb84 => AnyBox::Bipartite(bb84_family(unit_param(param)?)?),
        Family::Chsh => AnyBox::Bipartite(chsh_family(unit_param(param)?)?),
    })
}

fn svetlichny_parity(o: [u8; 3], x: [u8; 3]) -> u8 {
    o[0] ^ o[1] ^ o[2] ^ (x[0] & x[1]) ^ (x[0] & x[2]) ^ (x[1] & x[2])
}

pub fn svetlichny_family(mu: &Scalar) -> Result<TripartiteBox, BoxError> {
    unit_param(Some(mu))?;
    let dev = mu * &Scalar::sqrt2() * Scalar::ratio(1, 16);
    let base = Scalar::ratio(1, 8);
    Ok(TripartiteBox::from_fn(|o, x| {
        if svetlichny_parity(o, x) == 0 {
            &base + &dev
        } else {
            &base - &dev
        }
    }))
}

pub fn mermin_family(nu: &Scalar) -> Result<TripartiteBox, BoxError> {
    unit_param(Some(nu))?;
    let dev = nu * &Scalar::ratio(1, 8);
    let base = Scalar::ratio(1, 8);
    Ok(TripartiteBox::from_fn(|o, x| {
        if x[0] ^ x[1] ^ 1 != x[2] {
            base.clone()
        } else if svetlichny_parity(o, x) == 0 {
            &base + &dev
        } else {
            &base - &dev
        }
    }))
}

pub fn white_noise() -> TripartiteBox {
    TripartiteBox { entries: vec![Scalar::ratio(1, 8); TRI_LEN] }
}

pub fn bb84_family(v: &Scalar) -> Result<BipartiteBox, BoxError> {
    unit_param(Some(v))?;
    let dev = v * &Scalar::ratio(1, 4);
    let base = Scalar::ratio(1, 4);
    Ok(BipartiteBox::from_fn(|o, x| {
        if x[0] != x[1] {
            base.clone()
        } else if o[0] ^ o[1] == x[0] & x[1] {
            &base + &dev
        } else {
            &base - &dev
        }
    }))
}

pub fn chsh_family(v: &Scalar) -> Result<BipartiteBox, BoxError> {
    unit_param(Some(v))?;
    let dev = v * &Scalar::sqrt2() * Scalar::ratio(1, 8);
    let base = Scalar::ratio(1, 4);
    Ok(BipartiteBox::from_fn(|o, x| {
        if o[0] ^ o[1] == x[0] & x[1] {
            &base + &dev
        } else {
            &base - &dev
        }
    }))
}
