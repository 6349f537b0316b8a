//! Independent entanglement oracles: the partial-transpose spectrum and three
//! classes of principal minors of `σ^{T_S}`, each evaluated both in closed
//! form and as a direct determinant.
//!
//! Every minor is taken from `(1 ⊗ U)† σ^{T_S} (1 ⊗ U)` for an environment
//! basis `U`, which is unitarily similar to `σ^{T_S}`; a negative principal
//! minor there therefore certifies a negative partial-transpose eigenvalue.
//!
//! * `Y^{ij}_n`: `U` is the eigenbasis of `R_ii`; all rows of system level `i`
//!   plus row `(j, n)`. Zero-weight environment states that do not couple to
//!   the occupied ones through `W_ij` are dropped first.
//! * `Ỹ^{ij}_{nr}`: same basis, used when at least two zero-weight states
//!   survive; keeps the occupied rows of level `i`, one zero-weight row `r`,
//!   and row `(j, n)`.
//! * `X^{ijl}_{kq}`: `U` jointly diagonalizes `R_rr` and `W_ji`; rows
//!   `(i, k)`, `(j, k)`, `(l, q)`. `D_kq` is the qutrit case `(i,j,l) = (0,1,2)`.

use serde::Serialize;

use crate::criteria::{qubit_like_norms, CriterionReport, Verdict};
use crate::error::{Error, Result};
use crate::evolution::{
    conditional_block, joint_state, pair_operator, ConditionalPropagators, JointState,
};
use crate::linalg::{
    hermitian_eig, partial_transpose, simultaneous_diagonalize, ComplexMatrix, Subsystem,
    HERMITIAN_TOL,
};
use crate::model::ValidatedModel;

/// Environment weights below this count as zero.
pub const ZERO_WEIGHT_CUT: f64 = 1e-12;

/// `|y|` below this counts as no coupling.
pub const DECOUPLED_CUT: f64 = 1e-10;

/// Minors below `−NEGATIVE_CUT` are reported as witnesses.
pub const NEGATIVE_CUT: f64 = 1e-13;

/// Ascending eigenvalues of the partial transpose of `state`.
pub fn pt_spectrum(state: &JointState, subsystem: Subsystem) -> Result<Vec<f64>> {
    let (n, m) = state.dims;
    let pt = partial_transpose(&state.sigma, n, m, subsystem)?;
    Ok(hermitian_eig(&pt, HERMITIAN_TOL)?.eigenvalues)
}

/// Sum of the magnitudes of the negative eigenvalues.
pub fn negativity(spectrum: &[f64]) -> f64 {
    spectrum.iter().filter(|&&x| x < 0.0).map(|x| -x).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MinorClass {
    D,
    Y,
    Ytilde,
    X,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinorEvaluation {
    pub class: MinorClass,
    /// D: `(k, q)`; Y: `(i, j, n)`; Ỹ: `(i, j, n, r)`; X: `(i, j, l, k, q)`.
    pub indices: Vec<usize>,
    pub closed_form: f64,
    pub determinant: f64,
    /// False for Y minors that vanish identically (two or more zero weights).
    pub informative: bool,
    pub basis_note: String,
}

impl MinorEvaluation {
    pub fn discrepancy(&self) -> f64 {
        (self.closed_form - self.determinant).abs()
    }
}

fn rotated_pt(state: &JointState, env_basis: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (n, _) = state.dims;
    let pt = partial_transpose(&state.sigma, n, state.dims.1, Subsystem::System)?;
    let u = ComplexMatrix::identity(n).kron(env_basis);
    Ok(u.conjugate_by(&pt))
}

fn principal_minor(matrix: &ComplexMatrix, rows: &[usize]) -> Result<f64> {
    Ok(matrix.principal_submatrix(rows).determinant()?.re)
}

fn check_level(model: &ValidatedModel, k: usize) -> Result<()> {
    if k >= model.n() {
        return Err(Error::IndexOutOfRange(format!(
            "system level {k} of {}",
            model.n()
        )));
    }
    Ok(())
}

fn check_env(model: &ValidatedModel, e: usize) -> Result<()> {
    if e >= model.m() {
        return Err(Error::IndexOutOfRange(format!(
            "environment state {e} of {}",
            model.m()
        )));
    }
    Ok(())
}

fn require_qubit_like(
    model: &ValidatedModel,
    props: &ConditionalPropagators,
    tol_comm: f64,
) -> Result<f64> {
    let threshold = tol_comm * model.initial_env().frobenius_norm().max(1.0);
    for rec in qubit_like_norms(model, props)? {
        if rec.active && rec.norm > threshold {
            return Err(Error::PreconditionFailed(format!(
                "qubit-like condition j={} violated (norm {:.3e})",
                rec.j, rec.norm
            )));
        }
    }
    Ok(threshold)
}

/// Qutrit minor `D_kq`, i.e. `X^{012}_{kq}`.
pub fn minor_d(
    model: &ValidatedModel,
    props: &ConditionalPropagators,
    k: usize,
    q: usize,
    tol_comm: f64,
) -> Result<MinorEvaluation> {
    if model.n() != 3 {
        return Err(Error::PreconditionFailed(format!(
            "D minors are defined for a qutrit, got n = {}",
            model.n()
        )));
    }
    let mut eval = minor_x(model, props, 0, 1, 2, k, q, tol_comm)?;
    eval.class = MinorClass::D;
    eval.indices = vec![k, q];
    Ok(eval)
}

/// `X^{ijl}_{kq} = −2|c_i c_j c_l|² p_k³ |x_kq|² [1 − cos(φ_k − φ_q)]`, valid
/// when every qubit-like condition holds.
#[allow(clippy::too_many_arguments)]
pub fn minor_x(
    model: &ValidatedModel,
    props: &ConditionalPropagators,
    i: usize,
    j: usize,
    l: usize,
    k: usize,
    q: usize,
    tol_comm: f64,
) -> Result<MinorEvaluation> {
    let state = joint_state(model, props)?;
    minor_x_on(model, props, &state, [i, j, l], k, q, tol_comm)
}

fn minor_x_on(
    model: &ValidatedModel,
    props: &ConditionalPropagators,
    state: &JointState,
    [i, j, l]: [usize; 3],
    k: usize,
    q: usize,
    tol_comm: f64,
) -> Result<MinorEvaluation> {
    for s in [i, j, l] {
        check_level(model, s)?;
        if !model.is_active(s) {
            return Err(Error::PreconditionFailed(format!(
                "system level {s} is unpopulated"
            )));
        }
    }
    check_env(model, k)?;
    check_env(model, q)?;
    if i == j || j == l || i == l {
        return Err(Error::PreconditionFailed(format!(
            "X minors need distinct system levels, got ({i}, {j}, {l})"
        )));
    }
    let threshold = require_qubit_like(model, props, tol_comm)?;

    let r = model.reference_level();
    let r_ref = conditional_block(model, props, r, r)?;
    let w_ji = pair_operator(props, j, i)?;
    let w_li = pair_operator(props, l, i)?;
    let joint = simultaneous_diagonalize(&[r_ref, w_ji], threshold)?;
    let p: Vec<f64> = joint.diagonals[0].iter().map(|z| z.re).collect();
    let phase = &joint.diagonals[1];
    let x = joint.basis.conjugate_by(&w_li);
    let x_kq = x[(k, q)].norm();

    if (p[k] - p[q]).abs() * x_kq > 1e-8 {
        return Err(Error::PreconditionFailed(format!(
            "weights p_{k} = {} and p_{q} = {} differ although x_kq = {x_kq:.3e}",
            p[k], p[q]
        )));
    }

    let c = model.amplitudes();
    let amp = (c[i] * c[j] * c[l]).norm_sqr();
    let cos = (phase[k] / phase[k].norm() * (phase[q] / phase[q].norm()).conj()).re;
    let closed_form = -2.0 * amp * p[k].powi(3) * x_kq * x_kq * (1.0 - cos);

    let m = model.m();
    let rotated = rotated_pt(state, &joint.basis)?;
    let determinant = principal_minor(&rotated, &[i * m + k, j * m + k, l * m + q])?;

    Ok(MinorEvaluation {
        class: MinorClass::X,
        indices: vec![i, j, l, k, q],
        closed_form,
        determinant,
        informative: true,
        basis_note: format!("common eigenbasis of R_{r}{r} and W_{j}{i}"),
    })
}

/// Eigenbasis data of `R_ii` with `y = ⟨n|W_ij|m⟩`, after dropping
/// zero-weight states that do not couple to occupied ones.
struct YFrame {
    p: Vec<f64>,
    y: ComplexMatrix,
    basis: ComplexMatrix,
    kept: Vec<usize>,
    zeros: Vec<usize>,
    eliminated: Vec<usize>,
}

impl YFrame {
    fn new(
        model: &ValidatedModel,
        props: &ConditionalPropagators,
        i: usize,
        j: usize,
    ) -> Result<Self> {
        check_level(model, i)?;
        check_level(model, j)?;
        if i == j {
            return Err(Error::PreconditionFailed("Y minors need i != j".into()));
        }
        let eig = hermitian_eig(&conditional_block(model, props, i, i)?, HERMITIAN_TOL)?;
        let y = eig.eigenvectors.conjugate_by(&pair_operator(props, i, j)?);
        let p = eig.eigenvalues;
        let m = p.len();
        let is_zero = |s: usize| p[s] < ZERO_WEIGHT_CUT;
        let decoupled = |s: usize| {
            (0..m)
                .filter(|&n| !is_zero(n))
                .all(|n| y[(n, s)].norm() <= DECOUPLED_CUT && y[(s, n)].norm() <= DECOUPLED_CUT)
        };
        let eliminated: Vec<usize> = (0..m).filter(|&s| is_zero(s) && decoupled(s)).collect();
        let kept: Vec<usize> = (0..m).filter(|s| !eliminated.contains(s)).collect();
        let zeros = kept.iter().copied().filter(|&s| is_zero(s)).collect();
        Ok(Self {
            p,
            y,
            basis: eig.eigenvectors,
            kept,
            zeros,
            eliminated,
        })
    }

    fn note(&self, i: usize) -> String {
        if self.eliminated.is_empty() {
            format!("eigenbasis of R_{i}{i}")
        } else {
            format!(
                "eigenbasis of R_{i}{i}, decoupled states {:?} eliminated",
                self.eliminated
            )
        }
    }
}

/// `Y^{ij}_n`; see the module docs for the row selection.
pub fn minor_y(
    model: &ValidatedModel,
    props: &ConditionalPropagators,
    i: usize,
    j: usize,
    n: usize,
) -> Result<MinorEvaluation> {
    let state = joint_state(model, props)?;
    let frame = YFrame::new(model, props, i, j)?;
    minor_y_on(model, &state, &frame, i, j, n)
}

fn minor_y_on(
    model: &ValidatedModel,
    state: &JointState,
    frame: &YFrame,
    i: usize,
    j: usize,
    n: usize,
) -> Result<MinorEvaluation> {
    check_env(model, n)?;
    if frame.eliminated.contains(&n) {
        return Err(Error::PreconditionFailed(format!(
            "environment state {n} is decoupled and was eliminated"
        )));
    }
    let c = model.amplitudes();
    let (ci2, cj2) = (c[i].norm_sqr(), c[j].norm_sqr());
    let p = &frame.p;
    let y2 = |a: usize, b: usize| frame.y[(a, b)].norm_sqr();
    let prefactor = ci2.powi(frame.kept.len() as i32) * cj2;

    let (closed_form, informative) = match frame.zeros.as_slice() {
        [] => {
            let prod: f64 = frame.kept.iter().map(|&s| p[s]).product();
            let sum: f64 = frame
                .kept
                .iter()
                .map(|&k| p[k] * y2(k, n) - p[n] * p[n] / p[k] * y2(n, k))
                .sum();
            (prefactor * prod * sum, true)
        }
        [r] => {
            let value = if n == *r {
                0.0
            } else {
                let prod: f64 = frame
                    .kept
                    .iter()
                    .filter(|&&s| s != *r)
                    .map(|&s| p[s])
                    .product();
                -prefactor * prod * p[n] * p[n] * y2(n, *r)
            };
            (value, true)
        }
        _ => (0.0, false),
    };

    let m = model.m();
    let mut rows: Vec<usize> = frame.kept.iter().map(|&s| i * m + s).collect();
    rows.push(j * m + n);
    let determinant = principal_minor(&rotated_pt(state, &frame.basis)?, &rows)?;

    Ok(MinorEvaluation {
        class: MinorClass::Y,
        indices: vec![i, j, n],
        closed_form,
        determinant,
        informative,
        basis_note: frame.note(i),
    })
}

/// `Ỹ^{ij}_{nr} = −|c_i|^{2(M'+1)}|c_j|² (Π_{occupied} p_q) p_n² |y_nr|²`,
/// `M'` the number of occupied states; needs at least two surviving zero weights.
pub fn minor_ytilde(
    model: &ValidatedModel,
    props: &ConditionalPropagators,
    i: usize,
    j: usize,
    n: usize,
    r: usize,
) -> Result<MinorEvaluation> {
    let state = joint_state(model, props)?;
    let frame = YFrame::new(model, props, i, j)?;
    minor_ytilde_on(model, &state, &frame, i, j, n, r)
}

fn minor_ytilde_on(
    model: &ValidatedModel,
    state: &JointState,
    frame: &YFrame,
    i: usize,
    j: usize,
    n: usize,
    r: usize,
) -> Result<MinorEvaluation> {
    check_env(model, n)?;
    check_env(model, r)?;
    if frame.zeros.len() < 2 {
        return Err(Error::PreconditionFailed(format!(
            "Ỹ minors need at least two coupled zero weights, found {}",
            frame.zeros.len()
        )));
    }
    if !frame.zeros.contains(&r) {
        return Err(Error::PreconditionFailed(format!(
            "state {r} is not a coupled zero-weight state"
        )));
    }
    if frame.p[n] < ZERO_WEIGHT_CUT {
        return Err(Error::PreconditionFailed(format!(
            "state {n} has zero weight"
        )));
    }
    let occupied: Vec<usize> = frame
        .kept
        .iter()
        .copied()
        .filter(|s| !frame.zeros.contains(s))
        .collect();

    let c = model.amplitudes();
    let prod: f64 = occupied.iter().map(|&s| frame.p[s]).product();
    let closed_form = -c[i].norm_sqr().powi(occupied.len() as i32 + 1)
        * c[j].norm_sqr()
        * prod
        * frame.p[n].powi(2)
        * frame.y[(n, r)].norm_sqr();

    let m = model.m();
    let mut rows: Vec<usize> = occupied.iter().map(|&s| i * m + s).collect();
    rows.push(i * m + r);
    rows.push(j * m + n);
    let determinant = principal_minor(&rotated_pt(state, &frame.basis)?, &rows)?;

    Ok(MinorEvaluation {
        class: MinorClass::Ytilde,
        indices: vec![i, j, n, r],
        closed_form,
        determinant,
        informative: true,
        basis_note: frame.note(i),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WitnessClass {
    D,
    Y,
    Ytilde,
    X,
    #[serde(rename = "PT")]
    PartialTranspose,
}

impl From<MinorClass> for WitnessClass {
    fn from(c: MinorClass) -> Self {
        match c {
            MinorClass::D => WitnessClass::D,
            MinorClass::Y => WitnessClass::Y,
            MinorClass::Ytilde => WitnessClass::Ytilde,
            MinorClass::X => WitnessClass::X,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub class: WitnessClass,
    pub indices: Vec<usize>,
    pub closed_form: f64,
    pub determinant: f64,
    pub pt_min_eigenvalue: f64,
}

/// Every Y/Ỹ minor (for a qubit-like violation) or X minor (otherwise) that
/// the scan visits, in lexicographic index order.
pub fn scan_minors(
    model: &ValidatedModel,
    props: &ConditionalPropagators,
    report: &CriterionReport,
) -> Result<Vec<MinorEvaluation>> {
    let state = joint_state(model, props)?;
    let active: Vec<usize> = (0..model.n()).filter(|&k| model.is_active(k)).collect();
    let mut out = Vec::new();
    if !report.qubit_like_holds() {
        for &i in &active {
            for &j in active.iter().filter(|&&j| j != i) {
                let frame = YFrame::new(model, props, i, j)?;
                if frame.zeros.len() >= 2 {
                    for &n in frame.kept.iter().filter(|s| !frame.zeros.contains(s)) {
                        for &r in &frame.zeros {
                            out.push(minor_ytilde_on(model, &state, &frame, i, j, n, r)?);
                        }
                    }
                } else {
                    for &n in &frame.kept {
                        out.push(minor_y_on(model, &state, &frame, i, j, n)?);
                    }
                }
            }
        }
    } else {
        for &i in &active {
            for &j in &active {
                for &l in &active {
                    if i == j || j == l || i == l {
                        continue;
                    }
                    for k in 0..model.m() {
                        for q in 0..model.m() {
                            out.push(minor_x_on(
                                model,
                                props,
                                &state,
                                [i, j, l],
                                k,
                                q,
                                report.tol_comm,
                            )?);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Most negative minor per class for an entangled report. When no minor is
/// negative, the partial-transpose minimum is returned instead if it is.
pub fn witness_scan(
    model: &ValidatedModel,
    props: &ConditionalPropagators,
    report: &CriterionReport,
) -> Result<Vec<Witness>> {
    if report.verdict == Verdict::Separable {
        return Ok(Vec::new());
    }
    let state = joint_state(model, props)?;
    let pt_min = pt_spectrum(&state, Subsystem::System)?[0];

    let mut best: Vec<MinorEvaluation> = Vec::new();
    for eval in scan_minors(model, props, report)? {
        if eval.determinant >= -NEGATIVE_CUT {
            continue;
        }
        match best.iter_mut().find(|b| b.class == eval.class) {
            Some(b) if eval.determinant < b.determinant => *b = eval,
            Some(_) => {}
            None => best.push(eval),
        }
    }
    best.sort_by(|a, b| a.determinant.total_cmp(&b.determinant));

    let mut witnesses: Vec<Witness> = best
        .into_iter()
        .map(|e| Witness {
            class: e.class.into(),
            indices: e.indices,
            closed_form: e.closed_form,
            determinant: e.determinant,
            pt_min_eigenvalue: pt_min,
        })
        .collect();
    if witnesses.is_empty() && pt_min < 0.0 {
        witnesses.push(Witness {
            class: WitnessClass::PartialTranspose,
            indices: Vec::new(),
            closed_form: pt_min,
            determinant: pt_min,
            pt_min_eigenvalue: pt_min,
        });
    }
    Ok(witnesses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{decide_with, DEFAULT_TOL_COMM};
    use crate::evolution::propagators;
    use crate::fixtures;
    use crate::model::validate;

    fn paper() -> (ValidatedModel, ConditionalPropagators) {
        let model = validate(fixtures::qutrit_mixed_environment()).unwrap();
        let props = propagators(&model, fixtures::QUTRIT_EXAMPLE_INSTANT).unwrap();
        (model, props)
    }

    #[test]
    fn negativity_sums_negative_part() {
        assert_eq!(negativity(&[-0.25, -0.5, 0.1, 1.0]), 0.75);
        assert_eq!(negativity(&[0.0, 1.0]), 0.0);
    }

    #[test]
    fn paper_fixture_spectrum() {
        let (model, props) = paper();
        let state = joint_state(&model, &props).unwrap();
        for sub in [Subsystem::System, Subsystem::Environment] {
            let spec = pt_spectrum(&state, sub).unwrap();
            for (a, b) in spec.iter().zip(fixtures::QUTRIT_EXAMPLE_PT_SPECTRUM) {
                assert!((a - b).abs() < 1e-12, "{spec:?}");
            }
        }
    }

    #[test]
    fn d_minor_requires_qutrit() {
        let model = validate(
            crate::model::random_instance(
                &crate::model::EnsembleSpec {
                    seed: 1,
                    count: 1,
                    n: 4,
                    m: 2,
                    family: crate::model::Family::MixedEnvironment,
                },
                0,
            )
            .unwrap(),
        )
        .unwrap();
        let props = propagators(&model, 1.0).unwrap();
        assert!(matches!(
            minor_d(&model, &props, 0, 1, DEFAULT_TOL_COMM),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn x_minor_requires_distinct_levels() {
        let (model, props) = paper();
        assert!(matches!(
            minor_x(&model, &props, 0, 0, 2, 0, 1, DEFAULT_TOL_COMM),
            Err(Error::PreconditionFailed(_))
        ));
        assert!(matches!(
            minor_x(&model, &props, 0, 1, 2, 0, 2, DEFAULT_TOL_COMM),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn paper_fixture_scan_finds_x_witness() {
        let (model, props) = paper();
        let report = decide_with(&model, &props, DEFAULT_TOL_COMM).unwrap();
        let w = witness_scan(&model, &props, &report).unwrap();
        assert_eq!(w[0].class, WitnessClass::X);
        assert!(w[0].determinant < 0.0);
        assert!((w[0].pt_min_eigenvalue + 1.0 / 6.0).abs() < 1e-12);
    }
}
