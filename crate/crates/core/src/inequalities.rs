//! Svetlichny, Mermin and CHSH functionals.

use alloc::vec::Vec;

use crate::boxes::{BipartiteBox, TripartiteBox};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InequalityFamily {
    Svetlichny,
    Mermin,
    Chsh,
}

impl InequalityFamily {
    pub fn local_bound(self) -> i64 {
        match self {
            InequalityFamily::Svetlichny => 4,
            InequalityFamily::Mermin | InequalityFamily::Chsh => 2,
        }
    }

    /// Largest value any nonsignaling box reaches.
    pub fn algebraic_max(self) -> i64 {
        match self {
            InequalityFamily::Svetlichny => 8,
            InequalityFamily::Mermin | InequalityFamily::Chsh => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InequalityFamily::Svetlichny => "Svetlichny",
            InequalityFamily::Mermin => "Mermin",
            InequalityFamily::Chsh => "CHSH",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalityValue {
    pub family: InequalityFamily,
    pub label: Vec<u8>,
    pub value: Scalar,
    pub bound: i64,
    pub violated: bool,
    pub at_max: bool,
}

impl InequalityValue {
    fn new(family: InequalityFamily, label: &[u8], value: Scalar) -> Self {
        let bound = family.local_bound();
        InequalityValue {
            family,
            label: label.to_vec(),
            violated: value > Scalar::int(bound),
            at_max: value == Scalar::int(family.algebraic_max()),
            bound,
            value,
        }
    }
}

fn parity(v: u8) -> i8 {
    if v & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of `E_xyz` in `S_{αβγε}`, indexed by `x·4+y·2+z`.
pub fn svetlichny_coefficients([al, be, ga, ep]: [u8; 4]) -> [i8; 8] {
    core::array::from_fn(|t| {
        let (x, y, z) = ((t >> 2) as u8 & 1, (t >> 1) as u8 & 1, t as u8 & 1);
        parity((x & y) ^ (x & z) ^ (y & z) ^ (al & x) ^ (be & y) ^ (ga & z) ^ ep)
    })
}

/// Signs of `E_xyz` in `M_{αβγε}` (zero where the correlator is absent).
///
/// When `α⊕β⊕γ = 0` the functional uses the odd-parity input triples
/// `001, 010, 100, 111`; otherwise the even ones `000, 011, 101, 110`.
pub fn mermin_coefficients([al, be, ga, ep]: [u8; 4]) -> [i8; 8] {
    let mut k = [0i8; 8];
    if al ^ be ^ ga == 0 {
        k[0b001] = parity(ga ^ ep);
        k[0b010] = parity(be ^ ep);
        k[0b100] = parity(al ^ ep);
        k[0b111] = parity(al ^ be ^ ga ^ ep ^ 1);
    } else {
        k[0b110] = parity(al ^ be ^ ep ^ 1);
        k[0b101] = parity(al ^ ga ^ ep ^ 1);
        k[0b011] = parity(be ^ ga ^ ep ^ 1);
        k[0b000] = parity(ep);
    }
    k
}

fn triple_sum(b: &TripartiteBox, coeffs: [i8; 8]) -> Scalar {
    let mut s = Scalar::zero();
    for (t, &k) in coeffs.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let inputs = [(t >> 2) as u8 & 1, (t >> 1) as u8 & 1, t as u8 & 1];
        let e = b.expectation(0b111, inputs);
        if k > 0 {
            s += e;
        } else {
            s -= e;
        }
    }
    s
}

pub fn svetlichny_value(b: &TripartiteBox, label: [u8; 4]) -> Scalar {
    triple_sum(b, svetlichny_coefficients(label))
}

pub fn mermin_value(b: &TripartiteBox, label: [u8; 4]) -> Scalar {
    triple_sum(b, mermin_coefficients(label))
}

/// `Σ_yz (−1)^{yz⊕αy⊕βz⊕γ} E_yz` for each `(α,β,γ)`, indexed `α·4+β·2+γ`.
pub fn chsh_values(b: &BipartiteBox) -> [Scalar; 8] {
    let e: [Scalar; 4] = core::array::from_fn(|t| b.correlator((t >> 1) as u8, t as u8 & 1));
    core::array::from_fn(|l| {
        let (al, be, ga) = ((l >> 2) as u8 & 1, (l >> 1) as u8 & 1, l as u8 & 1);
        let mut s = Scalar::zero();
        for (t, et) in e.iter().enumerate() {
            let (y, z) = ((t >> 1) as u8, t as u8 & 1);
            if parity((y & z) ^ (al & y) ^ (be & z) ^ ga) > 0 {
                s += et;
            } else {
                s -= et;
            }
        }
        s
    })
}

pub fn label_bits<const N: usize>(v: usize) -> [u8; N] {
    core::array::from_fn(|i| (v >> (N - 1 - i) & 1) as u8)
}

/// All 16 Svetlichny and all 16 Mermin values, in label order.
pub fn violation_report(b: &TripartiteBox) -> Vec<InequalityValue> {
    let mut out = Vec::with_capacity(32);
    for v in 0..16 {
        let l = label_bits::<4>(v);
        out.push(InequalityValue::new(InequalityFamily::Svetlichny, &l, svetlichny_value(b, l)));
    }
    for v in 0..16 {
        let l = label_bits::<4>(v);
        out.push(InequalityValue::new(InequalityFamily::Mermin, &l, mermin_value(b, l)));
    }
    out
}

pub fn chsh_report(b: &BipartiteBox) -> Vec<InequalityValue> {
    chsh_values(b)
        .into_iter()
        .enumerate()
        .map(|(v, s)| InequalityValue::new(InequalityFamily::Chsh, &label_bits::<3>(v), s))
        .collect()
}
