//! Dense numerical cross-check for `n ≤ 3`.
//!
//! Concrete unitaries satisfying the promise are built from clock and shift
//! operators, and a circuit is run as the full Fourier sandwich. Because all
//! control is classical on the computational basis, each control branch is
//! simulated exactly as a product state over rails; the control marginal
//! after `F⁻¹` then follows from the Gram matrix of the branch states.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, ControlValues, Gate, NO_ROUTE};
use crate::commutation::{mul_mod, neg_mod, CommutationTable};
use crate::numsys::{factorial, NumError};

pub const UNITARITY_TOL: f64 = 1e-10;
pub const COMMUTATION_TOL: f64 = 1e-9;
pub const PROBABILITY_TOL: f64 = 1e-9;

/// Largest `n! · d · (data wires)` a dense run accepts.
const MAX_WORK: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DenseError {
    #[error("dense simulation is not supported for n = {0} (n <= 3)")]
    Unsupported(usize),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("state is not normalised (norm {0})")]
    NotNormalised(f64),
    #[error("no clock exponent sign satisfies the table (deviation {0:e})")]
    NoRealisation(f64),
    #[error("circuit needs {expected} unitaries of equal dimension, got {got}")]
    UnitCount { expected: usize, got: usize },
    #[error("problem too large for dense simulation ({0} amplitudes)")]
    TooLarge(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Num(#[from] NumError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseUnitary {
    m: DMatrix<Complex64>,
}

fn unitarity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let id = DMatrix::<Complex64>::identity(m.nrows(), m.ncols());
    (m.adjoint() * m - id).norm()
}

impl DenseUnitary {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self, DenseError> {
        if !m.is_square() {
            return Err(DenseError::NotUnitary(f64::INFINITY));
        }
        let dev = unitarity_deviation(&m);
        if dev > UNITARITY_TOL {
            return Err(DenseError::NotUnitary(dev));
        }
        Ok(Self { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    v: DVector<Complex64>,
}

impl StateVector {
    pub fn new(v: DVector<Complex64>) -> Result<Self, DenseError> {
        let norm = v.norm();
        if (norm - 1.0).abs() > UNITARITY_TOL {
            return Err(DenseError::NotNormalised(norm));
        }
        Ok(Self { v })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Self { v }
    }

    pub fn random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        let v = DVector::from_fn(dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let norm = v.norm();
        Self { v: v / Complex64::new(norm, 0.0) }
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.v
    }
}

fn root_of_unity(m: u64, power: u64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (power % m) as f64 / m as f64)
}

/// `F[x][y] = ω^{xy}/√m`, `ω = e^{2πi/m}`.
pub fn fourier(m: usize) -> DenseUnitary {
    let s = 1.0 / (m as f64).sqrt();
    let mu = m as u64;
    let f = DMatrix::from_fn(m, m, |x, y| root_of_unity(mu, mul_mod(x as u64, y as u64, mu)) * s);
    DenseUnitary { m: f }
}

fn shift(d: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(d, d, |r, c| if r == (c + 1) % d { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

fn clock_power(d: usize, m: u64) -> DMatrix<Complex64> {
    DMatrix::from_fn(d, d, |r, c| if r == c { root_of_unity(d as u64, mul_mod(r as u64, m, d as u64)) } else { Complex64::new(0.0, 0.0) })
}

/// `a · b`, skipping zero entries of `b` (the promise matrices are monomial).
fn product(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(a.nrows(), b.ncols());
    for j in 0..b.ncols() {
        for k in 0..b.nrows() {
            let v = b[(k, j)];
            if v != Complex64::new(0.0, 0.0) {
                for i in 0..a.nrows() {
                    out[(i, j)] += a[(i, k)] * v;
                }
            }
        }
    }
    out
}

/// Largest elementwise `|U_j U_k − ω^{e[j][k]·y} U_k U_j|` over all pairs.
pub fn commutation_deviation(units: &[DenseUnitary], table: &CommutationTable, y: u64) -> f64 {
    let m = table.modulus();
    let mut worst: f64 = 0.0;
    for j in 0..units.len() {
        for k in 0..units.len() {
            if j == k {
                continue;
            }
            let (a, b) = (units[j].matrix(), units[k].matrix());
            let phase = root_of_unity(m, mul_mod(table.get(j, k), y, m));
            let diff = product(a, b) - product(b, a) * phase;
            worst = worst.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    worst
}

/// Promise-satisfying unitaries for `n = 2` (a Pauli pair) or `n = 3` (one
/// clock/shift register of dimension 6 per pair of gates).
pub fn build_promise_unitaries(n: usize, y: u64, table: &CommutationTable) -> Result<Vec<DenseUnitary>, DenseError> {
    let modulus = factorial(n)?;
    let y = y % modulus;
    let units = match n {
        2 => {
            let re = |v: f64| Complex64::new(v, 0.0);
            let sx = DMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(1.0), re(0.0)]);
            let sy = DMatrix::from_row_slice(2, 2, &[re(0.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), re(0.0)]);
            let second = if mul_mod(table.get(0, 1), y, 2) == 0 { sx.clone() } else { sy };
            vec![DenseUnitary::new(sx)?, DenseUnitary::new(second)?]
        }
        3 => {
            let d = modulus as usize;
            let pairs = [(0, 1), (0, 2), (1, 2)];
            let build = |negate: bool| -> Result<Vec<DenseUnitary>, DenseError> {
                (0..n)
                    .map(|g| {
                        let mut acc = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
                        for &(j, k) in &pairs {
                            let e = mul_mod(table.get(j, k), y, modulus);
                            let power = if negate { neg_mod(e, modulus) } else { e };
                            let op = if g == j {
                                shift(d)
                            } else if g == k {
                                clock_power(d, power)
                            } else {
                                DMatrix::identity(d, d)
                            };
                            acc = acc.kronecker(&op);
                        }
                        DenseUnitary::new(acc)
                    })
                    .collect()
            };
            let first = build(false)?;
            let dev = commutation_deviation(&first, table, y);
            if dev < COMMUTATION_TOL {
                first
            } else {
                let second = build(true)?;
                let dev2 = commutation_deviation(&second, table, y);
                if dev2 >= COMMUTATION_TOL {
                    return Err(DenseError::NoRealisation(dev.min(dev2)));
                }
                second
            }
        }
        _ => return Err(DenseError::Unsupported(n)),
    };
    let dev = commutation_deviation(&units, table, y);
    if dev >= COMMUTATION_TOL {
        return Err(DenseError::NoRealisation(dev));
    }
    Ok(units)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    /// `|0⟩` on every data wire.
    Zero,
    /// Independent seeded random states per data wire.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOutcome {
    pub measured_y: u64,
    pub peak_probability: f64,
    pub probabilities: Vec<f64>,
    pub matches_truth: bool,
}

/// Final per-rail states of one control branch.
fn run_branch(c: &Circuit, units: &[DenseUnitary], init: &[DVector<Complex64>], x: u64) -> Result<Vec<DVector<Complex64>>, DenseError> {
    let values = c.control_values(x)?;
    let fires = |control: usize, polarity: crate::circuit::Polarity| match &values {
        ControlValues::Bits(bits) => polarity.fires(bits[control]),
        ControlValues::Qudit(_) => false,
    };
    let xi = x as usize;
    let mut rails: Vec<DVector<Complex64>> = init.to_vec();
    for g in c.gates() {
        match g {
            Gate::Apply { gate, rail } => rails[*rail] = units[*gate].matrix() * &rails[*rail],
            Gate::ControlledApply { gate, rail, control, polarity } => {
                if fires(*control, *polarity) {
                    rails[*rail] = units[*gate].matrix() * &rails[*rail];
                }
            }
            Gate::ControlledSwap { a, b, control, polarity } => {
                if fires(*control, *polarity) {
                    rails.swap(*a, *b);
                }
            }
            Gate::Rewire { rails: rs, perms, .. } => {
                let old: Vec<DVector<Complex64>> = rs.iter().map(|&r| rails[r].clone()).collect();
                for (i, &src) in perms[xi].iter().enumerate() {
                    rails[rs[i]] = old[src].clone();
                }
            }
            Gate::SwitchSwap { target, candidates, route, .. } => {
                if route[xi] != NO_ROUTE {
                    rails.swap(*target, candidates[route[xi] as usize]);
                }
            }
        }
    }
    Ok(rails)
}

/// Prepares the control in `F|0⟩`, runs `c` with `units` as black boxes,
/// applies `F⁻¹` and returns the most likely outcome.
pub fn run_dense(c: &Circuit, units: &[DenseUnitary], y_truth: u64, init: InitialState) -> Result<DenseOutcome, DenseError> {
    let n = c.n();
    if n > 3 {
        return Err(DenseError::Unsupported(n));
    }
    let d = units.first().map(DenseUnitary::dim).unwrap_or(0);
    if units.len() != n || units.iter().any(|u| u.dim() != d) {
        return Err(DenseError::UnitCount { expected: n, got: units.len() });
    }
    let size = c.control_size() as usize;
    let data: Vec<usize> = c.data_wires().map(|w| w.id).collect();
    let work = size * d * data.len();
    if work > MAX_WORK {
        return Err(DenseError::TooLarge(work));
    }
    let mut rng = match init {
        InitialState::Zero => None,
        InitialState::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let start: Vec<DVector<Complex64>> = (0..c.wires().len())
        .map(|w| {
            if !data.contains(&w) {
                return DVector::zeros(0);
            }
            match rng.as_mut() {
                Some(r) => StateVector::random(d, r).v,
                None => StateVector::basis(d, 0).v,
            }
        })
        .collect();

    let branches: Vec<Vec<DVector<Complex64>>> =
        (0..size as u64).map(|x| run_branch(c, units, &start, x)).collect::<Result<_, _>>()?;
    // gram[a][b] = ⟨branch a | branch b⟩ over all data rails
    let gram = DMatrix::from_fn(size, size, |a, b| {
        data.iter().fold(Complex64::new(1.0, 0.0), |acc, &r| acc * branches[a][r].dotc(&branches[b][r]))
    });
    let f = fourier(size);
    let amp0 = f.matrix().column(0).clone_owned();
    let inv = f.matrix().adjoint();
    let probabilities: Vec<f64> = (0..size)
        .map(|out| {
            let coeff = DVector::from_fn(size, |x, _| inv[(out, x)] * amp0[x]);
            (coeff.adjoint() * &gram * &coeff)[(0, 0)].re
        })
        .collect();
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(DenseError::NotNormalised(total));
    }
    let (measured, peak) = probabilities
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::MIN), |best, (i, p)| if p > best.1 { (i, p) } else { best });
    Ok(DenseOutcome {
        measured_y: measured as u64,
        peak_probability: peak,
        probabilities,
        matches_truth: measured as u64 == y_truth,
    })
}
