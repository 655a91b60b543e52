//! Three-qubit states, projective qubit measurements and Born-rule boxes.
//!
//! Everything here is `f64`. Exact analysis starts at [`snap_to_exact`].

use nalgebra::{Complex, Matrix2, SMatrix, SVector};
use nsbox_core::boxes::TRI_LEN;
use nsbox_core::superlocality::{PairClass, SublocalDecomposition, Term};
use nsbox_core::{BipartiteBox, BoxError, Cut, Scalar, SingleBox, TripartiteBox};
use thiserror::Error;

pub type C64 = Complex<f64>;
pub type Amplitudes = SVector<C64, 8>;
pub type Density = SMatrix<C64, 8, 8>;
pub type Qubit = Matrix2<C64>;

/// Slack allowed on norms, traces, Hermiticity and eigenvalues.
pub const STATE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum QuantumError {
    #[error("state vector has norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("density matrix is not Hermitian")]
    NotHermitian,
    #[error("density matrix has trace {0}, expected 1")]
    BadTrace(f64),
    #[error("density matrix has eigenvalue {0}")]
    NotPositive(f64),
    #[error("Bloch vector of party {party}, input {input} is not a unit vector")]
    NotUnit { party: usize, input: usize },
    #[error("Bloch vector {0:?} lies outside the unit ball")]
    BadBlochVector([f64; 3]),
    #[error("mixing weights must be two nonnegative numbers summing to 1")]
    BadDistribution,
    #[error("need one Bob and one Charlie state per mixing weight")]
    StateCountMismatch,
    #[error("denominator and tolerance must be positive")]
    BadSnapOptions,
    #[error("entry {index} = {value} is farther than {tolerance} from every a+b*sqrt2 with denominator {denominator}")]
    SnapFailure { index: usize, value: f64, tolerance: f64, denominator: u32 },
    #[error("snapped box is invalid: {0}")]
    InvalidSnapped(BoxError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ThreeQubitState {
    Pure(Amplitudes),
    Mixed(Box<Density>),
}

impl ThreeQubitState {
    pub fn pure(amplitudes: Amplitudes) -> Result<Self, QuantumError> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STATE_TOLERANCE {
            return Err(QuantumError::NotNormalized(norm));
        }
        Ok(ThreeQubitState::Pure(amplitudes))
    }

    pub fn mixed(rho: Density) -> Result<Self, QuantumError> {
        if (rho - rho.adjoint()).camax() > STATE_TOLERANCE {
            return Err(QuantumError::NotHermitian);
        }
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > STATE_TOLERANCE || trace.im.abs() > STATE_TOLERANCE {
            return Err(QuantumError::BadTrace(trace.re));
        }
        let lowest = rho.symmetric_eigenvalues().min();
        if lowest < -STATE_TOLERANCE {
            return Err(QuantumError::NotPositive(lowest));
        }
        Ok(ThreeQubitState::Mixed(Box::new(rho)))
    }

    pub fn density(&self) -> Density {
        match self {
            ThreeQubitState::Pure(psi) => psi * psi.adjoint(),
            ThreeQubitState::Mixed(rho) => **rho,
        }
    }
}

/// `cos θ |000⟩ + sin θ |111⟩`.
pub fn gghz_state(theta: f64) -> ThreeQubitState {
    let mut psi = Amplitudes::zeros();
    psi[0] = C64::new(theta.cos(), 0.0);
    psi[7] = C64::new(theta.sin(), 0.0);
    ThreeQubitState::Pure(psi)
}

/// `τ₃ = sin² 2θ`.
pub fn three_tangle_gghz(theta: f64) -> f64 {
    (2.0 * theta).sin().powi(2)
}

/// A single-qubit density matrix `(I + r·σ)/2` with `|r| ≤ 1`.
pub fn qubit_state(r: [f64; 3]) -> Result<Qubit, QuantumError> {
    let len = r.iter().map(|c| c * c).sum::<f64>().sqrt();
    if len > 1.0 + STATE_TOLERANCE {
        return Err(QuantumError::BadBlochVector(r));
    }
    Ok((Qubit::identity() + pauli(r)) * C64::new(0.5, 0.0))
}

/// `n·σ`.
fn pauli([x, y, z]: [f64; 3]) -> Qubit {
    Qubit::new(C64::new(z, 0.0), C64::new(x, -y), C64::new(x, y), C64::new(-z, 0.0))
}

/// `Πᵃ = (I + (−1)ᵃ n·σ)/2`.
fn projector(n: [f64; 3], outcome: u8) -> Qubit {
    let s = if outcome == 0 { 1.0 } else { -1.0 };
    (Qubit::identity() + pauli(n) * C64::new(s, 0.0)) * C64::new(0.5, 0.0)
}

/// Unit Bloch vectors indexed `[party][input]`, parties in the order A, B, C.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementSettings {
    directions: [[[f64; 3]; 2]; 3],
}

impl MeasurementSettings {
    pub fn new(directions: [[[f64; 3]; 2]; 3]) -> Result<Self, QuantumError> {
        for (party, pair) in directions.iter().enumerate() {
            for (input, n) in pair.iter().enumerate() {
                let len = n.iter().map(|c| c * c).sum::<f64>().sqrt();
                if (len - 1.0).abs() > STATE_TOLERANCE {
                    return Err(QuantumError::NotUnit { party, input });
                }
            }
        }
        Ok(MeasurementSettings { directions })
    }

    pub fn direction(&self, party: usize, input: usize) -> [f64; 3] {
        self.directions[party][input]
    }

    pub fn directions(&self) -> &[[[f64; 3]; 2]; 3] {
        &self.directions
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Settings under which GGHZ(θ) gives the Svetlichny family with `μ = sin 2θ`.
    Svetlichny,
    /// Settings under which GGHZ(θ) gives the Mermin family with `ν = sin 2θ`.
    Mermin,
    /// σx and σy for every party; GGHZ(π/4) then gives the Mermin box `M:1110`.
    MerminGhz,
}

const X: [f64; 3] = [1.0, 0.0, 0.0];
const Y: [f64; 3] = [0.0, 1.0, 0.0];
const MINUS_Y: [f64; 3] = [0.0, -1.0, 0.0];

pub fn preset_settings(kind: Preset) -> MeasurementSettings {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let directions = match kind {
        Preset::Svetlichny => [[X, Y], [[h, -h, 0.0], [h, h, 0.0]], [X, Y]],
        Preset::Mermin => [[X, Y], [X, Y], [MINUS_Y, X]],
        Preset::MerminGhz => [[X, Y], [X, Y], [X, Y]],
    };
    MeasurementSettings { directions }
}

/// 64 floating-point probabilities in the tripartite entry order.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatBox {
    pub entries: [f64; TRI_LEN],
}

impl FloatBox {
    pub fn get(&self, outputs: [u8; 3], inputs: [u8; 3]) -> f64 {
        self.entries[nsbox_core::boxes::tri_index(outputs, inputs)]
    }

    pub fn max_normalization_error(&self) -> f64 {
        self.entries
            .chunks(8)
            .map(|block| (block.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest change in any one- or two-party marginal when the other
    /// parties' inputs change.
    pub fn max_signaling_error(&self) -> f64 {
        let marginal = |keep: usize, outputs: usize, inputs: usize| -> f64 {
            (0..8).filter(|o| o & keep == outputs).map(|o| self.entries[inputs * 8 + o]).sum()
        };
        let mut worst: f64 = 0.0;
        for keep in 1..7usize {
            for x in 0..8usize {
                for x2 in 0..8usize {
                    if (x ^ x2) & keep != 0 {
                        continue;
                    }
                    for o in (0..8).filter(|o| o & !keep == 0) {
                        worst = worst.max((marginal(keep, o, x) - marginal(keep, o, x2)).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs_difference(&self, other: &FloatBox) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn from_exact(b: &TripartiteBox) -> FloatBox {
        FloatBox { entries: std::array::from_fn(|i| b.entries()[i].to_f64()) }
    }
}

/// `Tr(ρ · A⊗B⊗C)`.
fn triple_expectation(rho: &Density, ops: [&Qubit; 3]) -> f64 {
    let mut s = C64::new(0.0, 0.0);
    for i in 0..8 {
        for j in 0..8 {
            let k = ops[0][(i >> 2, j >> 2)] * ops[1][((i >> 1) & 1, (j >> 1) & 1)] * ops[2][(i & 1, j & 1)];
            s += k * rho[(j, i)];
        }
    }
    s.re
}

pub fn born_box(state: &ThreeQubitState, settings: &MeasurementSettings) -> FloatBox {
    let rho = state.density();
    let proj: [[[Qubit; 2]; 2]; 3] = std::array::from_fn(|party| {
        std::array::from_fn(|input| std::array::from_fn(|o| projector(settings.direction(party, input), o as u8)))
    });
    let entries = std::array::from_fn(|i| {
        let (o, x) = nsbox_core::boxes::tri_split(i);
        let ops = [0, 1, 2].map(|p| &proj[p][x[p] as usize][o[p] as usize]);
        triple_expectation(&rho, ops)
    });
    FloatBox { entries }
}

/// The lattice `{k/D + (m/D)√2}` used by [`snap_to_exact`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapOptions {
    pub denominator: u32,
    pub tolerance: f64,
}

impl Default for SnapOptions {
    fn default() -> Self {
        SnapOptions { denominator: 32, tolerance: 1e-9 }
    }
}

/// Nearest lattice point to `v`, preferring the smallest `|m|` on ties.
pub fn snap_value(v: f64, opts: SnapOptions) -> Option<Scalar> {
    let d = opts.denominator as i64;
    let df = d as f64;
    let mut best: Option<(f64, i64, i64)> = None;
    for m in (0..=d).flat_map(|m| if m == 0 { vec![0] } else { vec![m, -m] }) {
        let surd = m as f64 * std::f64::consts::SQRT_2 / df;
        let k = ((v - surd) * df).round() as i64;
        let err = (v - k as f64 / df - surd).abs();
        if best.is_none_or(|(e, _, _)| err < e) {
            best = Some((err, k, m));
        }
    }
    let (err, k, m) = best?;
    (err <= opts.tolerance).then(|| Scalar::ratio(k, d) + Scalar::ratio(m, d) * Scalar::sqrt2())
}

fn check_options(opts: SnapOptions) -> Result<(), QuantumError> {
    if opts.denominator == 0 || opts.tolerance.is_nan() || opts.tolerance <= 0.0 {
        return Err(QuantumError::BadSnapOptions);
    }
    Ok(())
}

fn snap_all(values: &[f64], opts: SnapOptions) -> Result<Vec<Scalar>, QuantumError> {
    check_options(opts)?;
    values
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            snap_value(value, opts).ok_or(QuantumError::SnapFailure {
                index,
                value,
                tolerance: opts.tolerance,
                denominator: opts.denominator,
            })
        })
        .collect()
}

/// Rounds every entry onto the lattice and validates the result exactly.
pub fn snap_to_exact(fbox: &FloatBox, opts: SnapOptions) -> Result<TripartiteBox, QuantumError> {
    TripartiteBox::new(snap_all(&fbox.entries, opts)?).map_err(QuantumError::InvalidSnapped)
}

/// One branch `i` of a classical-quantum state: weight `pᵢ`, Alice's
/// response `⟨i|Πᵃₓ|i⟩` and the Bob–Charlie box of `ρᴮᵢ⊗ρᶜᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatTerm {
    pub weight: f64,
    /// `P(a|x)` at index `x·2+a`.
    pub single: [f64; 4],
    /// `P(bc|yz)` at index `(y·2+z)·4+(b·2+c)`.
    pub pair: [f64; 16],
}

/// A local model of a classical-quantum box across `A|BC` with one term
/// per classical branch.
#[derive(Clone, Debug, PartialEq)]
pub struct CqWitness {
    pub terms: Vec<FloatTerm>,
    /// Whether Alice's responses are all 0 or 1, i.e. she measures in the
    /// classical basis.
    pub alice_deterministic: bool,
}

impl CqWitness {
    pub fn reconstruct(&self) -> FloatBox {
        let mut entries = [0.0; TRI_LEN];
        for t in &self.terms {
            for (row, a) in t.single.iter().enumerate() {
                for (col, f) in t.pair.iter().enumerate() {
                    entries[Cut::A.entry(row, col)] += t.weight * a * f;
                }
            }
        }
        FloatBox { entries }
    }

    /// Snaps every weight and factor, giving an exact decomposition whose
    /// pair factors are nonsignaling.
    pub fn snap(&self, opts: SnapOptions) -> Result<SublocalDecomposition, QuantumError> {
        let mut terms = Vec::new();
        for t in &self.terms {
            if t.weight == 0.0 {
                continue;
            }
            let weight = snap_all(&[t.weight], opts)?.remove(0);
            let single = snap_all(&t.single, opts)?;
            let single = SingleBox::new(std::array::from_fn(|i| single[i].clone())).map_err(QuantumError::InvalidSnapped)?;
            let pair = BipartiteBox::new(snap_all(&t.pair, opts)?).map_err(QuantumError::InvalidSnapped)?;
            terms.push(Term { weight, single, pair });
        }
        Ok(SublocalDecomposition { cut: Cut::A, class: PairClass::NonSignaling, terms })
    }
}

fn single_expectation(rho: &Qubit, op: &Qubit) -> f64 {
    (rho * op).trace().re
}

/// The box of `Σᵢ pᵢ |i⟩⟨i| ⊗ ρᴮᵢ ⊗ ρᶜᵢ` under `settings`, with its
/// two-term local model across `A|BC`.
pub fn cq_box_with_witness(
    p: [f64; 2],
    bob_states: &[Qubit],
    charlie_states: &[Qubit],
    settings: &MeasurementSettings,
) -> Result<(FloatBox, CqWitness), QuantumError> {
    if p.iter().any(|&w| !(0.0..=1.0).contains(&w)) || (p[0] + p[1] - 1.0).abs() > STATE_TOLERANCE {
        return Err(QuantumError::BadDistribution);
    }
    if bob_states.len() != 2 || charlie_states.len() != 2 {
        return Err(QuantumError::StateCountMismatch);
    }
    let proj = |party: usize, input: usize, o: usize| projector(settings.direction(party, input), o as u8);
    let mut terms = Vec::new();
    for i in 0..2 {
        let mut basis = Qubit::zeros();
        basis[(i, i)] = C64::new(1.0, 0.0);
        let single = std::array::from_fn(|k| single_expectation(&basis, &proj(0, k >> 1, k & 1)));
        let pair = std::array::from_fn(|k| {
            let (y, z, b, c) = (k >> 3, (k >> 2) & 1, (k >> 1) & 1, k & 1);
            single_expectation(&bob_states[i], &proj(1, y, b))
                * single_expectation(&charlie_states[i], &proj(2, z, c))
        });
        terms.push(FloatTerm { weight: p[i], single, pair });
    }
    let alice_deterministic = terms
        .iter()
        .all(|t| t.single.iter().all(|v| v.abs() < STATE_TOLERANCE || (v - 1.0).abs() < STATE_TOLERANCE));

    let mut rho = Density::zeros();
    for i in 0..2 {
        let bc = bob_states[i].kronecker(&charlie_states[i]);
        for r in 0..4 {
            for c in 0..4 {
                rho[(i * 4 + r, i * 4 + c)] = bc[(r, c)] * C64::new(p[i], 0.0);
            }
        }
    }
    let fbox = born_box(&ThreeQubitState::Mixed(Box::new(rho)), settings);
    Ok((fbox, CqWitness { terms, alice_deterministic }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nsbox_core::boxes::{mermin_family, svetlichny_family, white_noise};
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    #[test]
    fn gghz_amplitudes_and_tangle() {
        let ThreeQubitState::Pure(psi) = gghz_state(0.0) else { panic!("pure") };
        assert_eq!(psi[0].re, 1.0);
        assert!((three_tangle_gghz(FRAC_PI_4) - 1.0).abs() < 1e-15);
        assert!((three_tangle_gghz(FRAC_PI_8) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn presets_match_operators() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(preset_settings(Preset::Svetlichny).direction(1, 0), [h, -h, 0.0]);
        assert_eq!(preset_settings(Preset::Svetlichny).direction(0, 0), X);
        assert_eq!(preset_settings(Preset::MerminGhz).direction(2, 1), Y);
        for kind in [Preset::Svetlichny, Preset::Mermin, Preset::MerminGhz] {
            assert!(MeasurementSettings::new(*preset_settings(kind).directions()).is_ok());
        }
    }

    #[test]
    fn ghz_reproduces_the_families() {
        let sv = born_box(&gghz_state(FRAC_PI_4), &preset_settings(Preset::Svetlichny));
        let exact = FloatBox::from_exact(&svetlichny_family(&Scalar::one()).unwrap());
        assert!(sv.max_abs_difference(&exact) < 1e-12);
        let mf = born_box(&gghz_state(FRAC_PI_4), &preset_settings(Preset::Mermin));
        let exact = FloatBox::from_exact(&mermin_family(&Scalar::one()).unwrap());
        assert!(mf.max_abs_difference(&exact) < 1e-12);
        let product = born_box(&gghz_state(0.0), &preset_settings(Preset::Svetlichny));
        assert!(product.max_abs_difference(&FloatBox::from_exact(&white_noise())) < 1e-12);
    }

    #[test]
    fn snapping_examples() {
        let opts = SnapOptions::default();
        assert_eq!(snap_value(0.1875, opts), Some(Scalar::ratio(3, 16)));
        let v = (2.0 + std::f64::consts::SQRT_2) / 16.0;
        assert_eq!(snap_value(v, opts), Some(Scalar::ratio(1, 8) + Scalar::ratio(1, 16) * Scalar::sqrt2()));
        assert_eq!(snap_value(0.2001, SnapOptions { tolerance: 1e-6, ..opts }), None);
        let mut fb = FloatBox::from_exact(&white_noise());
        fb.entries[5] = 0.2001;
        assert!(matches!(snap_to_exact(&fb, opts), Err(QuantumError::SnapFailure { index: 5, .. })));
        fb.entries[5] = 0.25;
        assert!(matches!(snap_to_exact(&fb, opts), Err(QuantumError::InvalidSnapped(_))));
    }

    #[test]
    fn invalid_states_are_rejected() {
        let mut psi = Amplitudes::zeros();
        psi[0] = C64::new(0.5, 0.0);
        assert!(matches!(ThreeQubitState::pure(psi), Err(QuantumError::NotNormalized(_))));
        let mut rho = Density::zeros();
        rho[(0, 0)] = C64::new(1.5, 0.0);
        rho[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(matches!(ThreeQubitState::mixed(rho), Err(QuantumError::NotPositive(_))));
        rho[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(ThreeQubitState::mixed(rho), Err(QuantumError::NotHermitian)));
        assert!(qubit_state([1.0, 1.0, 0.0]).is_err());
        assert!(MeasurementSettings::new([[X, X], [X, [0.5, 0.0, 0.0]], [X, X]]).is_err());
    }

    #[test]
    fn classical_basis_mixture_is_deterministic() {
        let z = [0.0, 0.0, 1.0];
        let settings = MeasurementSettings::new([[z, z], [z, z], [z, z]]).unwrap();
        let s = [qubit_state([0.0, 0.0, 1.0]).unwrap(), qubit_state([0.0, 0.0, -1.0]).unwrap()];
        let (fbox, w) = cq_box_with_witness([0.5, 0.5], &s, &s, &settings).unwrap();
        assert!(w.alice_deterministic);
        assert!(w.reconstruct().max_abs_difference(&fbox) < 1e-12);
        let exact = snap_to_exact(&fbox, SnapOptions::default()).unwrap();
        let d0 = nsbox_core::boxes::make_vertex(&"D:000000".parse().unwrap());
        let d1 = nsbox_core::boxes::make_vertex(&"D:010101".parse().unwrap());
        let half = Scalar::ratio(1, 2);
        assert_eq!(exact, TripartiteBox::combine(&[(&half, &d0), (&half, &d1)]));
        assert!(w.snap(SnapOptions::default()).unwrap().verify(&exact));
    }

    #[test]
    fn single_branch_gives_one_term() {
        let z = [0.0, 0.0, 1.0];
        let settings = MeasurementSettings::new([[z, z], [X, Y], [X, Y]]).unwrap();
        let s = [qubit_state([0.5, 0.0, 0.0]).unwrap(), qubit_state([0.0, 0.5, 0.0]).unwrap()];
        let (fbox, w) = cq_box_with_witness([1.0, 0.0], &s, &s, &settings).unwrap();
        let exact = snap_to_exact(&fbox, SnapOptions::default()).unwrap();
        let snapped = w.snap(SnapOptions::default()).unwrap();
        assert_eq!(snapped.dimension(), 1);
        assert!(snapped.verify(&exact));
    }

    #[test]
    fn non_classical_alice_still_reconstructs() {
        let settings = MeasurementSettings::new([[X, Y], [X, Y], [X, Y]]).unwrap();
        let b = [qubit_state(X).unwrap(), qubit_state([-1.0, 0.0, 0.0]).unwrap()];
        let c = [qubit_state(Y).unwrap(), qubit_state(Y).unwrap()];
        let (fbox, w) = cq_box_with_witness([0.5, 0.5], &b, &c, &settings).unwrap();
        assert!(!w.alice_deterministic);
        assert!(w.reconstruct().max_abs_difference(&fbox) < 1e-12);
    }
}
