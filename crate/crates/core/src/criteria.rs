//! Separability verdict for pure-dephasing joint states.
//!
//! Two families of conditions are evaluated at time `t`, both referred to a
//! reference level `r` (level 0 unless it is unpopulated):
//!
//! * qubit-like: `‖[R(0), w_r† w_j]‖_F` for every `j ≠ r` (N−1 records);
//! * cross: `‖[W_jr, W_lr]‖_F` for every pair `j > l`, both `≠ r`
//!   ((N−1)(N−2)/2 records).
//!
//! The state is separable exactly when all of them vanish. The explicit
//! product decomposition is then built from a basis diagonalizing `R_rr(t)`
//! and every `W_jr(t)` at once.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{
    conditional_block, joint_state, pair_operator, propagators, ConditionalPropagators,
};
use crate::linalg::{commutator_norm, simultaneous_diagonalize, Complex64, ComplexMatrix};
use crate::model::ValidatedModel;

/// Default relative commutator threshold.
pub const DEFAULT_TOL_COMM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Separable,
    Entangled,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Separable => "Separable",
            Verdict::Entangled => "Entangled",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitLikeRecord {
    pub j: usize,
    pub norm: f64,
    /// False when level `j` or the reference level is unpopulated; such a
    /// record does not enter the verdict.
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossRecord {
    pub j: usize,
    pub l: usize,
    pub norm: f64,
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub t: f64,
    pub verdict: Verdict,
    pub reference: usize,
    pub qubit_like: Vec<QubitLikeRecord>,
    pub cross: Vec<CrossRecord>,
    /// Smallest `|norm − threshold|` over the active records.
    pub margin: Option<f64>,
    /// Identifiers of the violated conditions.
    pub witnesses: Vec<String>,
    pub tol_comm: f64,
    pub qubit_like_threshold: f64,
    pub cross_threshold: f64,
}

impl CriterionReport {
    pub fn max_qubit_like_norm(&self) -> f64 {
        self.qubit_like.iter().map(|r| r.norm).fold(0.0, f64::max)
    }

    pub fn max_cross_norm(&self) -> f64 {
        self.cross.iter().map(|r| r.norm).fold(0.0, f64::max)
    }

    pub fn qubit_like_holds(&self) -> bool {
        self.qubit_like
            .iter()
            .all(|r| !r.active || r.norm <= self.qubit_like_threshold)
    }

    pub fn cross_holds(&self) -> bool {
        self.cross
            .iter()
            .all(|r| !r.active || r.norm <= self.cross_threshold)
    }
}

/// `‖[R(0), w_r† w_j]‖_F` for every `j ≠ r`, `r` the reference level.
pub fn qubit_like_norms(
    model: &ValidatedModel,
    props: &ConditionalPropagators,
) -> Result<Vec<QubitLikeRecord>> {
    let r = model.reference_level();
    let w_r_dag = props.w(r).adjoint();
    (0..model.n())
        .filter(|&j| j != r)
        .map(|j| {
            Ok(QubitLikeRecord {
                j,
                norm: commutator_norm(model.initial_env(), &(&w_r_dag * props.w(j)))?,
                active: model.is_active(j) && model.is_active(r),
            })
        })
        .collect()
}

/// `‖[W_j0, W_l0]‖_F` for `0 < l < j < N`.
pub fn cross_commutation_norms(props: &ConditionalPropagators) -> Result<Vec<CrossRecord>> {
    cross_norms_from(props, 0, |_| true)
}

fn cross_norms_from(
    props: &ConditionalPropagators,
    reference: usize,
    active: impl Fn(usize) -> bool,
) -> Result<Vec<CrossRecord>> {
    let n = props.len();
    let w: Vec<Option<ComplexMatrix>> = (0..n)
        .map(|j| {
            (j != reference)
                .then(|| pair_operator(props, j, reference))
                .transpose()
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for j in 0..n {
        for l in 0..j {
            if let (Some(wj), Some(wl)) = (&w[j], &w[l]) {
                out.push(CrossRecord {
                    j,
                    l,
                    norm: commutator_norm(wj, wl)?,
                    active: active(j) && active(l) && active(reference),
                });
            }
        }
    }
    Ok(out)
}

pub fn decide(model: &ValidatedModel, t: f64, tol_comm: f64) -> Result<CriterionReport> {
    let props = propagators(model, t)?;
    decide_with(model, &props, tol_comm)
}

/// Verdict from precomputed propagators. The qubit-like threshold is
/// `tol_comm · max(1, ‖R(0)‖_F)`; the cross threshold is `tol_comm`.
pub fn decide_with(
    model: &ValidatedModel,
    props: &ConditionalPropagators,
    tol_comm: f64,
) -> Result<CriterionReport> {
    let reference = model.reference_level();
    let qubit_like = qubit_like_norms(model, props)?;
    let cross = cross_norms_from(props, reference, |k| model.is_active(k))?;
    let qubit_like_threshold = tol_comm * model.initial_env().frobenius_norm().max(1.0);
    let cross_threshold = tol_comm;

    let mut witnesses = Vec::new();
    let mut margin: Option<f64> = None;
    let mut track = |norm: f64, threshold: f64| {
        let d = (norm - threshold).abs();
        margin = Some(margin.map_or(d, |m| m.min(d)));
        norm > threshold
    };
    for rec in qubit_like.iter().filter(|r| r.active) {
        if track(rec.norm, qubit_like_threshold) {
            witnesses.push(format!("qubit_like:j={}", rec.j));
        }
    }
    for rec in cross.iter().filter(|r| r.active) {
        if track(rec.norm, cross_threshold) {
            witnesses.push(format!("cross:j={},l={}", rec.j, rec.l));
        }
    }

    Ok(CriterionReport {
        t: props.t(),
        verdict: if witnesses.is_empty() {
            Verdict::Separable
        } else {
            Verdict::Entangled
        },
        reference,
        qubit_like,
        cross,
        margin,
        witnesses,
        tol_comm,
        qubit_like_threshold,
        cross_threshold,
    })
}

/// `σ(t) = Σ_n p_n ρ_n ⊗ |n⟩⟨n|`.
#[derive(Debug, Clone)]
pub struct SeparableDecomposition {
    pub weights: Vec<f64>,
    /// Columns are the environment states `|n(t)⟩`.
    pub env_basis: ComplexMatrix,
    /// `phases[i][n] = ⟨n|W_ir|n⟩`, unimodular; `e^{iφ_n^{ij}} = phases[i][n]·conj(phases[j][n])`.
    pub phases: Vec<Vec<Complex64>>,
    /// Pure system states `ρ_n`.
    pub system_states: Vec<ComplexMatrix>,
}

impl SeparableDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n_sys = self.system_states[0].rows();
        let m = self.env_basis.rows();
        let mut out = ComplexMatrix::zeros(n_sys * m, n_sys * m);
        for (n, (p, rho)) in self.weights.iter().zip(&self.system_states).enumerate() {
            let env = ComplexMatrix::outer(&self.env_basis.column(n));
            out = &out + &rho.kron(&env).scale_real(*p);
        }
        out
    }
}

pub fn build_decomposition(
    model: &ValidatedModel,
    props: &ConditionalPropagators,
    report: &CriterionReport,
) -> Result<SeparableDecomposition> {
    if report.verdict != Verdict::Separable {
        return Err(Error::NotSeparable);
    }
    let n = model.n();
    let r = report.reference;
    let active: Vec<usize> = (0..n).filter(|&k| model.is_active(k)).collect();

    let mut ops = vec![conditional_block(model, props, r, r)?];
    for &j in active.iter().filter(|&&j| j != r) {
        ops.push(pair_operator(props, j, r)?);
    }
    let tol = report.qubit_like_threshold.max(report.cross_threshold);
    let joint = simultaneous_diagonalize(&ops, tol)?;

    let m = model.m();
    let weights: Vec<f64> = joint.diagonals[0].iter().map(|z| z.re).collect();
    let one = Complex64::new(1.0, 0.0);
    let mut phases = vec![vec![one; m]; n];
    for (slot, &j) in active.iter().filter(|&&j| j != r).enumerate() {
        phases[j] = joint.diagonals[slot + 1]
            .iter()
            .map(|z| z / z.norm())
            .collect();
    }

    let c = model.amplitudes();
    let system_states = (0..m)
        .map(|e| {
            ComplexMatrix::from_fn(n, n, |i, j| {
                c[i] * c[j].conj() * phases[i][e] * phases[j][e].conj()
            })
        })
        .collect();

    Ok(SeparableDecomposition {
        weights,
        env_basis: joint.basis,
        phases,
        system_states,
    })
}

/// `‖Σ_n p_n ρ_n ⊗ |n⟩⟨n| − σ(t)‖_F`.
pub fn reconstruction_error(
    model: &ValidatedModel,
    props: &ConditionalPropagators,
    decomposition: &SeparableDecomposition,
) -> Result<f64> {
    let state = joint_state(model, props)?;
    Ok((&decomposition.reconstruct() - &state.sigma).frobenius_norm())
}
