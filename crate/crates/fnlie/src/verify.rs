//! Randomized verification suites.
//!
//! Every suite draws reproducible instances from `(seed, trial)` sub-seeded
//! generators, materializes each instance as a model file, and checks the
//! claimed identity with exact arithmetic. On failure the offending model
//! file is returned; re-loading it and re-running the same check fails
//! identically, because the check reads the instance back out of the model.

use rand::Rng;

use crate::classify::{
    h_map, h_map_coord, j_map, jacobi_defect, phi_bracket, twist_form, HermitianPair,
};
use crate::connection::{curvature_pair, hook, Connection, HermitianConnection};
use crate::dsl::{restrict_tangent, Binding, DefKind, ModelFile};
use crate::exterior::{contract_field, parity_sign, rat_sign, ComplexForm, Form, Tvf};
use crate::qbundle::{h_pairing, LiouvilleKind, ProjTvf, Section};
use crate::rand_gen;
use crate::scalar::rat;
use crate::{Error, Result};

/// The published suite names, in the order they are reported.
pub const SUITE_NAMES: &[&str] = &[
    "fn-antisym",
    "fn-jacobi",
    "lie-derivation",
    "dual-route",
    "proj-closure",
    "linear-closure",
    "hermitian-closure",
    "curvature-identities",
    "iso-theorem",
    "jacobi-defect",
    "inverse-pair",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    FnAntisym,
    FnJacobi,
    LieDerivation,
    DualRoute,
    ProjClosure,
    LinearClosure,
    HermitianClosure,
    CurvatureIdentities,
    IsoTheorem,
    JacobiDefect,
    InversePair,
}

impl Suite {
    pub fn from_name(name: &str) -> Option<Suite> {
        match name {
            "fn-antisym" => Some(Suite::FnAntisym),
            "fn-jacobi" => Some(Suite::FnJacobi),
            "lie-derivation" => Some(Suite::LieDerivation),
            "dual-route" => Some(Suite::DualRoute),
            "proj-closure" => Some(Suite::ProjClosure),
            "linear-closure" => Some(Suite::LinearClosure),
            "hermitian-closure" => Some(Suite::HermitianClosure),
            "curvature-identities" => Some(Suite::CurvatureIdentities),
            "iso-theorem" => Some(Suite::IsoTheorem),
            "jacobi-defect" => Some(Suite::JacobiDefect),
            "inverse-pair" => Some(Suite::InversePair),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::FnAntisym => "fn-antisym",
            Suite::FnJacobi => "fn-jacobi",
            Suite::LieDerivation => "lie-derivation",
            Suite::DualRoute => "dual-route",
            Suite::ProjClosure => "proj-closure",
            Suite::LinearClosure => "linear-closure",
            Suite::HermitianClosure => "hermitian-closure",
            Suite::CurvatureIdentities => "curvature-identities",
            Suite::IsoTheorem => "iso-theorem",
            Suite::JacobiDefect => "jacobi-defect",
            Suite::InversePair => "inverse-pair",
        }
    }

    pub fn default_trials(self) -> u64 {
        match self {
            Suite::FnAntisym | Suite::DualRoute => 200,
            Suite::FnJacobi => 50,
            Suite::CurvatureIdentities => 100,
            _ => 100,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteParams {
    pub dim: usize,
    pub max_degree: usize,
    pub coeff_degree: u32,
    pub trials: u64,
    pub seed: u64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams { dim: 2, max_degree: 2, coeff_degree: 2, trials: 100, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub enum SuiteOutcome {
    Pass { trials: u64 },
    Fail { trial: u64, reason: String, model: ModelFile },
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, SuiteOutcome::Pass { .. })
    }
}

/// Runs a suite; the first failing trial stops the run and is returned as a
/// loadable model.
pub fn run_suite(suite: Suite, p: &SuiteParams) -> Result<SuiteOutcome> {
    for trial in 0..p.trials {
        let model = build_instance(suite, trial, p)?;
        if let Some(reason) = check_model(suite, &model)? {
            return Ok(SuiteOutcome::Fail { trial, reason, model });
        }
    }
    Ok(SuiteOutcome::Pass { trials: p.trials })
}

fn internal(msg: &str) -> Error {
    Error::Internal(msg.to_string())
}

// ---------------------------------------------------------------------------
// instance construction

fn new_model(dim: usize) -> ModelFile {
    let names: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    ModelFile::new("E", &refs)
}

fn push_pair(m: &mut ModelFile, stem: &str, underline: &Tvf, bar: &Form) {
    let total = m.qchart.total().clone();
    m.push(DefKind::Tvf, &format!("{stem}u"), Binding::Tvf(underline.promote(&total)));
    m.push(DefKind::Form, &format!("{stem}b"), Binding::Form(bar.promote(&total)));
}

fn random_pair(
    rng: &mut rand_chacha::ChaCha8Rng,
    m: &ModelFile,
    degree: usize,
    coeff_degree: u32,
) -> (Tvf, Form) {
    let base = m.qchart.base();
    (
        rand_gen::tvf(rng, base, degree, coeff_degree),
        rand_gen::form(rng, base, degree, coeff_degree),
    )
}

fn build_instance(suite: Suite, trial: u64, p: &SuiteParams) -> Result<ModelFile> {
    let mut rng = rand_gen::trial_rng(p.seed, trial);
    let mut m = new_model(p.dim);
    let qc = m.qchart.clone();
    let total = qc.total().clone();
    let deg = |rng: &mut rand_chacha::ChaCha8Rng| rng.gen_range(0..=p.max_degree);
    match suite {
        Suite::FnAntisym | Suite::DualRoute => {
            let (r, s) = (deg(&mut rng), deg(&mut rng));
            let a = rand_gen::tvf(&mut rng, &total, r, p.coeff_degree);
            let b = rand_gen::tvf(&mut rng, &total, s, p.coeff_degree);
            m.push(DefKind::Tvf, "A", Binding::Tvf(a));
            m.push(DefKind::Tvf, "B", Binding::Tvf(b));
        }
        Suite::FnJacobi => {
            for name in ["A", "B", "C"] {
                let r = deg(&mut rng);
                let t = rand_gen::tvf(&mut rng, &total, r, p.coeff_degree);
                m.push(DefKind::Tvf, name, Binding::Tvf(t));
            }
        }
        Suite::LieDerivation => {
            let (r, s, q) = (deg(&mut rng), deg(&mut rng), deg(&mut rng));
            let a = rand_gen::tvf(&mut rng, &total, r, p.coeff_degree);
            let b = rand_gen::tvf(&mut rng, &total, s, p.coeff_degree);
            let alpha = rand_gen::form(&mut rng, &total, q, p.coeff_degree);
            m.push(DefKind::Tvf, "A", Binding::Tvf(a));
            m.push(DefKind::Tvf, "B", Binding::Tvf(b));
            m.push(DefKind::Form, "a", Binding::Form(alpha));
        }
        Suite::ProjClosure => {
            let (r, s) = (deg(&mut rng), deg(&mut rng));
            let a = rand_gen::proj_tvf(&mut rng, &qc, r, p.coeff_degree);
            let b = rand_gen::proj_tvf(&mut rng, &qc, s, p.coeff_degree);
            m.push(DefKind::ProjTvf, "A", Binding::ProjTvf(a));
            m.push(DefKind::ProjTvf, "B", Binding::ProjTvf(b));
        }
        Suite::LinearClosure => {
            let (r, s, t) = (deg(&mut rng), deg(&mut rng), deg(&mut rng));
            let a = rand_gen::linear_proj_tvf(&mut rng, &qc, r, p.coeff_degree);
            let b = rand_gen::complex_linear_proj_tvf(&mut rng, &qc, s, p.coeff_degree);
            let a2 = rand_gen::linear_proj_tvf(&mut rng, &qc, t, p.coeff_degree);
            m.push(DefKind::ProjTvf, "A", Binding::ProjTvf(a));
            m.push(DefKind::ProjTvf, "B", Binding::ProjTvf(b));
            m.push(DefKind::ProjTvf, "A2", Binding::ProjTvf(a2));
        }
        Suite::HermitianClosure => {
            if trial % 10 == 9 {
                // a deliberately non-Hermitian instance, rejected by both routes
                let r = deg(&mut rng);
                let mut n = rand_gen::hermitian_proj_tvf(&mut rng, &qc, r, p.coeff_degree);
                let combo: Vec<usize> = (0..r).collect();
                let mi = crate::exterior::MultiIndex::new(combo).unwrap();
                n.insert_fiber(
                    mi,
                    0,
                    crate::scalar::ScalarField::coordinate(&total, qc.w_index(0)),
                );
                m.push(DefKind::ProjTvf, "N", Binding::ProjTvf(n));
            } else {
                let (r, s) = (deg(&mut rng), deg(&mut rng));
                let a = rand_gen::hermitian_proj_tvf(&mut rng, &qc, r, p.coeff_degree);
                let b = rand_gen::hermitian_proj_tvf(&mut rng, &qc, s, p.coeff_degree);
                m.push(DefKind::ProjTvf, "A", Binding::ProjTvf(a));
                m.push(DefKind::ProjTvf, "B", Binding::ProjTvf(b));
            }
        }
        Suite::CurvatureIdentities => {
            let hermitian = trial % 2 == 1;
            let conn = if hermitian {
                rand_gen::hermitian_connection(&mut rng, &qc, p.coeff_degree).connection()
            } else {
                rand_gen::linear_connection(&mut rng, &qc, p.coeff_degree)
            };
            m.push(DefKind::Connection, "c", Binding::Connection(conn));
            let (r, s) = (deg(&mut rng), deg(&mut rng));
            let x = rand_gen::tvf(&mut rng, qc.base(), r, p.coeff_degree);
            let y = rand_gen::tvf(&mut rng, qc.base(), s, p.coeff_degree);
            m.push(DefKind::Tvf, "X", Binding::Tvf(x.promote(&total)));
            m.push(DefKind::Tvf, "Y", Binding::Tvf(y.promote(&total)));
            if hermitian {
                let psi = rand_gen::section(&mut rng, &qc, p.coeff_degree);
                let phi2 = rand_gen::section(&mut rng, &qc, p.coeff_degree);
                m.push(DefKind::Section, "Psi", Binding::Section(psi));
                m.push(DefKind::Section, "Phi2", Binding::Section(phi2));
            }
        }
        Suite::IsoTheorem => {
            let conn = rand_gen::hermitian_connection(&mut rng, &qc, p.coeff_degree);
            m.push(DefKind::Connection, "c", Binding::Connection(conn.connection()));
            for stem in ["P1", "P2"] {
                let r = deg(&mut rng);
                let (u, b) = random_pair(&mut rng, &m, r, p.coeff_degree);
                push_pair(&mut m, stem, &u, &b);
            }
        }
        Suite::InversePair => {
            let conn = rand_gen::hermitian_connection(&mut rng, &qc, p.coeff_degree);
            m.push(DefKind::Connection, "c", Binding::Connection(conn.connection()));
            let r = deg(&mut rng);
            let (u, b) = random_pair(&mut rng, &m, r, p.coeff_degree);
            push_pair(&mut m, "P1", &u, &b);
            let s = deg(&mut rng);
            let xi = rand_gen::hermitian_proj_tvf(&mut rng, &qc, s, p.coeff_degree);
            m.push(DefKind::ProjTvf, "Xi", Binding::ProjTvf(xi));
        }
        Suite::JacobiDefect => {
            let base = qc.base().clone();
            if p.dim >= 3 && trial % 5 == 4 {
                // non-closed Φ on a decomposable frame triple
                let phi = rand_gen::non_closed_2form(&mut rng, &base, p.coeff_degree);
                m.push(DefKind::Form, "Phi", Binding::Form(phi.promote(&total)));
                for k in 0..3usize {
                    let r = rng.gen_range(0..=p.max_degree.min(1));
                    let xi = rand_gen::form(&mut rng, &base, r, p.coeff_degree);
                    let x = Tvf::basis_vector(&base, k);
                    m.push(
                        DefKind::Form,
                        &format!("xi{}", k + 1),
                        Binding::Form(xi.promote(&total)),
                    );
                    m.push(DefKind::Tvf, &format!("X{}", k + 1), Binding::Tvf(x.promote(&total)));
                }
            } else {
                let phi = rand_gen::closed_2form(&mut rng, &base, p.coeff_degree);
                m.push(DefKind::Form, "Phi", Binding::Form(phi.promote(&total)));
                for stem in ["P1", "P2", "P3"] {
                    let r = deg(&mut rng);
                    let (u, b) = random_pair(&mut rng, &m, r, p.coeff_degree);
                    push_pair(&mut m, stem, &u, &b);
                }
            }
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// model readers

fn get_tvf(m: &ModelFile, name: &str) -> Result<Tvf> {
    match m.get(name).map(|d| &d.binding) {
        Some(Binding::Tvf(t)) => Ok(t.clone()),
        _ => Err(internal(&format!("model is missing tvf `{name}`"))),
    }
}

fn get_form(m: &ModelFile, name: &str) -> Result<Form> {
    match m.get(name).map(|d| &d.binding) {
        Some(Binding::Form(f)) => Ok(f.clone()),
        _ => Err(internal(&format!("model is missing form `{name}`"))),
    }
}

fn get_proj(m: &ModelFile, name: &str) -> Result<ProjTvf> {
    match m.get(name).map(|d| &d.binding) {
        Some(Binding::ProjTvf(x)) => Ok(x.clone()),
        _ => Err(internal(&format!("model is missing projtvf `{name}`"))),
    }
}

fn get_conn(m: &ModelFile, name: &str) -> Result<Connection> {
    match m.get(name).map(|d| &d.binding) {
        Some(Binding::Connection(c)) => Ok(c.clone()),
        _ => Err(internal(&format!("model is missing connection `{name}`"))),
    }
}

fn get_section(m: &ModelFile, name: &str) -> Result<Section> {
    match m.get(name).map(|d| &d.binding) {
        Some(Binding::Section(s)) => Ok(s.clone()),
        _ => Err(internal(&format!("model is missing section `{name}`"))),
    }
}

fn get_base_tvf(m: &ModelFile, name: &str) -> Result<Tvf> {
    let t = get_tvf(m, name)?;
    restrict_tangent(&t, &m.qchart)
        .ok_or_else(|| internal(&format!("tvf `{name}` does not live on the base")))
}

fn get_base_form(m: &ModelFile, name: &str) -> Result<Form> {
    get_form(m, name)?.restrict(m.qchart.base())
}

fn get_hermitian_pair(m: &ModelFile, stem: &str) -> Result<HermitianPair> {
    let u = get_base_tvf(m, &format!("{stem}u"))?;
    let b = get_base_form(m, &format!("{stem}b"))?;
    HermitianPair::new(u, b)
}

fn get_hermitian_connection(m: &ModelFile, name: &str) -> Result<HermitianConnection> {
    let c = get_conn(m, name)?;
    match c.hermitian_potential()? {
        Some(a) => HermitianConnection::new(&m.qchart, a),
        None => Err(internal(&format!("connection `{name}` has no Hermitian potential"))),
    }
}

// ---------------------------------------------------------------------------
// checks

/// Runs the suite's identity check on the instance encoded in the model.
/// `Ok(None)` is a pass; `Ok(Some(reason))` is a counterexample.
pub fn check_model(suite: Suite, m: &ModelFile) -> Result<Option<String>> {
    match suite {
        Suite::FnAntisym => {
            let a = get_tvf(m, "A")?;
            let b = get_tvf(m, "B")?;
            let sign = rat_sign(parity_sign(a.degree() * b.degree()));
            let residual = a.fn_bracket(&b)?.add(&b.fn_bracket(&a)?.scale(&sign));
            Ok(nonzero_reason(residual.is_zero(), "[A,B] + (-1)^{rs}[B,A] is nonzero"))
        }
        Suite::FnJacobi => {
            let a = get_tvf(m, "A")?;
            let b = get_tvf(m, "B")?;
            let c = get_tvf(m, "C")?;
            let (r1, r2, r3) = (a.degree(), b.degree(), c.degree());
            let t1 = a.fn_bracket(&b.fn_bracket(&c)?)?.scale(&rat_sign(parity_sign(r1 * r3)));
            let t2 = b.fn_bracket(&c.fn_bracket(&a)?)?.scale(&rat_sign(parity_sign(r2 * r1)));
            let t3 = c.fn_bracket(&a.fn_bracket(&b)?)?.scale(&rat_sign(parity_sign(r3 * r2)));
            let residual = t1.add(&t2).add(&t3);
            Ok(nonzero_reason(residual.is_zero(), "graded Jacobi sum is nonzero"))
        }
        Suite::LieDerivation => {
            let a = get_tvf(m, "A")?;
            let b = get_tvf(m, "B")?;
            let alpha = get_form(m, "a")?;
            let sign = rat_sign(parity_sign(a.degree() * b.degree()));
            let lhs = a
                .lie_form(&b.lie_form(&alpha)?)?
                .sub(&b.lie_form(&a.lie_form(&alpha)?)?.scale(&sign));
            let rhs = a.fn_bracket(&b)?.lie_form(&alpha)?;
            Ok(nonzero_reason(lhs == rhs, "[L(A),L(B)]a differs from L([A,B])a"))
        }
        Suite::DualRoute => {
            let a = get_tvf(m, "A")?;
            let b = get_tvf(m, "B")?;
            let lhs = a.fn_bracket(&b)?;
            let rhs = a.fn_bracket_coord(&b)?;
            Ok(nonzero_reason(lhs == rhs, "decomposable and coordinate routes disagree"))
        }
        Suite::ProjClosure => {
            let a = get_proj(m, "A")?;
            let b = get_proj(m, "B")?;
            let br = match a.fn_bracket(&b) {
                Ok(br) => br,
                Err(e) => return Ok(Some(format!("bracket left the projectable algebra: {e}"))),
            };
            let under = a.underline().fn_bracket(&b.underline())?;
            Ok(nonzero_reason(br.underline() == under, "underline([A,B]) differs from [A_,B_]"))
        }
        Suite::LinearClosure => {
            let a = get_proj(m, "A")?;
            let b = get_proj(m, "B")?;
            let a2 = get_proj(m, "A2")?;
            if !a.is_real_linear() || !a2.is_real_linear() {
                return Err(internal("generator produced a non-real-linear instance"));
            }
            if !b.is_complex_linear() {
                return Err(internal("generator produced a non-complex-linear instance"));
            }
            let i_field = ProjTvf::liouville(&m.qchart, LiouvilleKind::Real);
            let ii_field = ProjTvf::liouville(&m.qchart, LiouvilleKind::Imaginary);
            if !a.fn_bracket(&i_field)?.is_zero() {
                return Ok(Some("[A, I] is nonzero for a real-linear A".into()));
            }
            if !b.fn_bracket(&ii_field)?.is_zero() {
                return Ok(Some("[B, iI] is nonzero for a complex-linear B".into()));
            }
            let br = a.fn_bracket(&a2)?;
            Ok(nonzero_reason(br.is_real_linear(), "[A,A2] left the linear subalgebra"))
        }
        Suite::HermitianClosure => {
            if let Some(def) = m.get("N") {
                let n = match &def.binding {
                    Binding::ProjTvf(p) => p.clone(),
                    _ => return Err(internal("`N` is not a projtvf")),
                };
                if n.is_hermitian_coords() {
                    return Ok(Some("coordinate route accepted a non-Hermitian instance".into()));
                }
                if n.is_hermitian_metric() {
                    return Ok(Some("metric route accepted a non-Hermitian instance".into()));
                }
                return Ok(None);
            }
            let a = get_proj(m, "A")?;
            let b = get_proj(m, "B")?;
            for (name, xi) in [("A", &a), ("B", &b)] {
                if !xi.is_hermitian_coords() || !xi.is_hermitian_metric() {
                    return Err(internal(&format!("generator produced non-Hermitian `{name}`")));
                }
                if !xi.is_complex_linear() {
                    return Ok(Some(format!("Hermitian `{name}` is not complex-linear")));
                }
            }
            let c = a.fn_bracket(&b)?;
            if !c.is_hermitian_coords() {
                return Ok(Some("[A,B] is not Hermitian (coordinate route)".into()));
            }
            if !c.is_hermitian_metric() {
                return Ok(Some("[A,B] is not Hermitian (metric route)".into()));
            }
            if !c.is_complex_linear() {
                return Ok(Some("[A,B] is not complex-linear".into()));
            }
            let (au, ab) = a.hermitian_decompose()?;
            let (bu, bb) = b.hermitian_decompose()?;
            let (cu, cb) = c.hermitian_decompose()?;
            let sign = rat_sign(parity_sign(a.degree() * b.degree()));
            let want_u = au.fn_bracket(&bu)?;
            let want_b = au.lie_form(&bb)?.sub(&bu.lie_form(&ab)?.scale(&sign));
            if cu != want_u {
                return Ok(Some("underline of [A,B] differs from [A_,B_]".into()));
            }
            Ok(nonzero_reason(
                cb == want_b,
                "bar of [A,B] differs from L(A_)Bbar - (-1)^{rs} L(B_)Abar",
            ))
        }
        Suite::CurvatureIdentities => {
            let c = get_conn(m, "c")?;
            let x = get_base_tvf(m, "X")?;
            let y = get_base_tvf(m, "Y")?;
            let r_curv = c.curvature()?;
            if r_curv != c.curvature_coord() {
                return Ok(Some("curvature routes disagree".into()));
            }
            for (name, u) in [("X", &x), ("Y", &y)] {
                let lhs = c.cov_ext_diff(&c.horizontal_lift(u)?)?;
                let rhs = hook(u, &r_curv)?;
                if lhs != rhs {
                    return Ok(Some(format!("[c, c({name})] differs from {name} hook R[c]")));
                }
            }
            let lhs = c.horizontal_lift(&x)?.fn_bracket(&c.horizontal_lift(&y)?)?;
            let rhs = c
                .horizontal_lift(&x.fn_bracket(&y)?)?
                .sub(&curvature_pair(&x, &y, &r_curv)?);
            if lhs != rhs {
                return Ok(Some("[c(X),c(Y)] differs from c([X,Y]) - R(X,Y)".into()));
            }
            if m.get("Psi").is_none() {
                return Ok(None);
            }
            // the Hermitian triad plus the ∇-Leibniz rule
            let h = get_hermitian_connection(m, "c")?;
            let phi = h.phi_form();
            if phi != h.potential().ext_d().scale(&rat(2)) {
                return Ok(Some("Phi[c] differs from 2 dA".into()));
            }
            if phi != h.phi_form_trace()? {
                return Ok(Some("Phi[c] differs from i tr R[c]".into()));
            }
            if !phi.ext_d().is_zero() {
                return Ok(Some("dPhi[c] is nonzero".into()));
            }
            let want_r = ProjTvf::i_form_liouville(&m.qchart, &phi)?.neg();
            if r_curv != want_r {
                return Ok(Some("R[c] differs from -i Phi[c] (x) I".into()));
            }
            let psi = get_section(m, "Psi")?;
            let phi2 = get_section(m, "Phi2")?;
            let pairing = h_pairing(&psi, &phi2);
            let lhs = ComplexForm::new(
                Form::from_scalar(pairing.re).ext_d(),
                Form::from_scalar(pairing.im).ext_d(),
            );
            let n_psi = h.nabla_section(&psi)?;
            let n_phi2 = h.nabla_section(&phi2)?;
            let conj_npsi = ComplexForm::new(n_psi.re.clone(), n_psi.im.neg());
            let rhs = conj_npsi
                .scale_complex(phi2.psi())
                .add(&n_phi2.scale_complex(&psi.psi().conj()));
            Ok(nonzero_reason(lhs == rhs, "d h(Psi,Phi2) differs from h(nabla Psi,Phi2) + h(Psi,nabla Phi2)"))
        }
        Suite::IsoTheorem => {
            let h = get_hermitian_connection(m, "c")?;
            let p1 = get_hermitian_pair(m, "P1")?;
            let p2 = get_hermitian_pair(m, "P2")?;
            let tw = twist_form(&h);
            let lhs = j_map(&h, &phi_bracket(&tw, &p1, &p2)?)?;
            let rhs = j_map(&h, &p1)?.fn_bracket(&j_map(&h, &p2)?)?;
            Ok(nonzero_reason(lhs == rhs, "j[c] does not intertwine the twisted bracket"))
        }
        Suite::InversePair => {
            let h = get_hermitian_connection(m, "c")?;
            let p1 = get_hermitian_pair(m, "P1")?;
            let xi = get_proj(m, "Xi")?;
            let round1 = h_map(&h, &j_map(&h, &p1)?)?;
            if round1 != p1 {
                return Ok(Some("h[c] after j[c] is not the identity".into()));
            }
            let round2 = j_map(&h, &h_map(&h, &xi)?)?;
            if round2 != xi {
                return Ok(Some("j[c] after h[c] is not the identity".into()));
            }
            let direct = h_map(&h, &xi)?;
            let coord = h_map_coord(&h, &xi)?;
            Ok(nonzero_reason(direct == coord, "h[c] routes disagree"))
        }
        Suite::JacobiDefect => {
            let phi = get_base_form(m, "Phi")?;
            if m.get("P1u").is_some() {
                let p1 = get_hermitian_pair(m, "P1")?;
                let p2 = get_hermitian_pair(m, "P2")?;
                let p3 = get_hermitian_pair(m, "P3")?;
                if !phi.ext_d().is_zero() {
                    return Err(internal("closed-route instance has non-closed Phi"));
                }
                let defect = jacobi_defect(&phi, &p1, &p2, &p3)?;
                return Ok(nonzero_reason(
                    defect.is_zero(),
                    "jacobi defect is nonzero for closed Phi",
                ));
            }
            // decomposable route: P_k = (xi_k ⊗ X_k, 0)
            let mut pairs = Vec::new();
            let mut xis = Vec::new();
            let mut fields = Vec::new();
            for k in 1..=3 {
                let xi = get_base_form(m, &format!("xi{k}"))?;
                let x = get_base_tvf(m, &format!("X{k}"))?;
                let underline = Tvf::tensor(&xi, &x)?;
                pairs.push(HermitianPair::new(
                    underline,
                    Form::zero(m.qchart.base(), xi.degree()),
                )?);
                xis.push(xi);
                fields.push(x);
            }
            let defect = jacobi_defect(&phi, &pairs[0], &pairs[1], &pairs[2])?;
            if !defect.underline.is_zero() {
                return Ok(Some("jacobi defect has a nonzero underline part".into()));
            }
            let dphi = phi.ext_d();
            let scalar = contract_field(
                &contract_field(&contract_field(&dphi, &fields[0]), &fields[1]),
                &fields[2],
            );
            let expected = xis[0]
                .wedge(&xis[1])?
                .wedge(&xis[2])?
                .scale_field(&scalar.comp(&crate::exterior::MultiIndex::empty()));
            Ok(nonzero_reason(
                defect.bar == expected,
                "jacobi defect differs from the dPhi closed form",
            ))
        }
    }
}

fn nonzero_reason(ok: bool, reason: &str) -> Option<String> {
    if ok {
        None
    } else {
        Some(reason.to_string())
    }
}
