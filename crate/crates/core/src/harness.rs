//! Problems, suites and reports.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexes::{
    apply_partial, braiding, compose, hom_complex, random_complex, shift, tensor, Complex, GradedMap, Window,
};
use crate::dg::{
    build_dgp, build_transported, compose_algebra_tensor, end_ring, phi, psi, rho, verify_key_square, DGWindow,
    EndRing, TransportedDG,
};
use crate::error::{DgError, HarnessError, ModuleError, PresentationError};
use crate::field::{Field, FieldSpec, Fp, Prime, Rational};
use crate::linalg::Matrix;
use crate::modules::{
    check_self_injective, hom_space, is_isomorphic, projective_cover, radical_spans, representable, stable_hom,
    stable_hom_dim_via_envelope, stalk, syzygy, Isomorphism, Rep, RepMap, DEFAULT_ISO_TRIALS,
};
use crate::presentations::{present, split_semisimple, tensor_with_algebra, FDCategory, QuiverPresentation};
use crate::resolutions::{complete_resolution, tensor_resolution, CompleteResolution};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 20240601;
pub const REPORT_SCHEMA: &str = include_str!("../schemas/report.schema.json");

pub const SUITES: &[&str] = &[
    "module-layer",
    "sign-calculus",
    "lemma-psi",
    "lemma-rho",
    "dg-functor",
    "main-theorem",
    "m-periodic",
    "ikm",
    "non-formality",
];

const DG_SUITES: &[&str] = &[
    "lemma-psi",
    "lemma-rho",
    "dg-functor",
    "main-theorem",
    "m-periodic",
    "ikm",
    "non-formality",
];

const ALGEBRA_SUITES: &[&str] = &["lemma-rho", "dg-functor", "main-theorem"];

/// Bundled problems, by name.
pub const FIXTURES: &[(&str, &str)] = &[
    ("cyclic2", include_str!("../fixtures/cyclic2.json")),
    ("cyclic2_split", include_str!("../fixtures/cyclic2_split.json")),
    ("cyclic2_rationals", include_str!("../fixtures/cyclic2_rationals.json")),
    ("periodic2", include_str!("../fixtures/periodic2.json")),
    ("cyclic3", include_str!("../fixtures/cyclic3.json")),
    ("cube_f3", include_str!("../fixtures/cube_f3.json")),
    ("dual_numbers", include_str!("../fixtures/dual_numbers.json")),
    ("ikm", include_str!("../fixtures/ikm.json")),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraSpec {
    /// A one-vertex quiver presentation.
    Quiver(QuiverPresentation),
    /// `k × ... × k` with `n` factors.
    SplitSemisimple(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub schema_version: u32,
    pub name: String,
    pub shape: QuiverPresentation,
    #[serde(default)]
    pub algebra: Option<AlgebraSpec>,
    #[serde(default)]
    pub field: FieldSpec,
    pub window: Window,
    pub suites: Vec<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn violation(field: impl Into<String>, message: impl ToString) -> HarnessError {
    HarnessError::SchemaViolation {
        field: field.into(),
        message: message.to_string(),
    }
}

/// Parses and validates a problem.
pub fn parse_problem(text: &str) -> Result<Problem, HarnessError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let p: Problem = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_data() {
            violation(path, inner)
        } else {
            HarnessError::ParseError {
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            }
        }
    })?;
    validate_problem(&p)?;
    Ok(p)
}

pub fn validate_problem(p: &Problem) -> Result<(), HarnessError> {
    if p.schema_version != SCHEMA_VERSION {
        return Err(violation("schema_version", format!("expected {SCHEMA_VERSION}, found {}", p.schema_version)));
    }
    if p.window.lo > p.window.hi {
        return Err(violation("window", format!("empty window {}", p.window)));
    }
    for s in &p.suites {
        if !SUITES.contains(&s.as_str()) {
            return Err(HarnessError::UnknownSuite(s.clone()));
        }
    }
    if p.suites.iter().any(|s| DG_SUITES.contains(&s.as_str())) && !p.window.contains_window(&Window { lo: -3, hi: 3 }) {
        return Err(violation("window", format!("{} must contain [-3, 3] for dg suites", p.window)));
    }
    if p.suites.iter().any(|s| ALGEBRA_SUITES.contains(&s.as_str())) && p.algebra.is_none() {
        return Err(violation("algebra", "required by the requested suites"));
    }
    p.shape.validate_names().map_err(|e| violation("shape", e))?;
    if let Some(AlgebraSpec::Quiver(a)) = &p.algebra {
        a.validate_names().map_err(|e| violation("algebra.quiver", e))?;
        if a.vertices.len() != 1 {
            return Err(violation("algebra.quiver.vertices", "the algebra must have exactly one vertex"));
        }
    }
    match p.field {
        FieldSpec::Prime(q) => {
            let ctx = Prime::new(q).map_err(|e| violation("field", e))?;
            build_categories::<Fp>(ctx, p).map(|_| ())
        }
        FieldSpec::Rationals => build_categories::<Rational>((), p).map(|_| ()),
    }
}

type Categories<F> = (Arc<FDCategory<F>>, Option<Arc<FDCategory<F>>>);

fn build_categories<F: Field>(ctx: F::Ctx, p: &Problem) -> Result<Categories<F>, HarnessError> {
    let shape_err = |e: PresentationError| violation("shape", e);
    let q = Arc::new(present::<F>(ctx, &p.shape).map_err(shape_err)?);
    let a = match &p.algebra {
        None => None,
        Some(AlgebraSpec::Quiver(a)) => Some(Arc::new(present::<F>(ctx, a).map_err(|e| violation("algebra", e))?)),
        Some(AlgebraSpec::SplitSemisimple(n)) => {
            if *n == 0 {
                return Err(violation("algebra.split_semisimple", "must be positive"));
            }
            Some(Arc::new(split_semisimple::<F>(ctx, *n)))
        }
    };
    Ok((q, a))
}

pub fn load_problem(path: &Path) -> Result<Problem, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_problem(&text)
}

pub fn fixture(name: &str) -> Option<Problem> {
    FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_problem(text).expect("bundled fixtures are valid"))
}

pub fn problem_to_json(p: &Problem) -> String {
    serde_json::to_string_pretty(p).expect("problems serialize") + "\n"
}

pub fn save_problem(p: &Problem, path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, problem_to_json(p)).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Location {
    pub suite: String,
    pub pair: Option<[usize; 2]>,
    pub degree: Option<i64>,
    pub block: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub location: Location,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRow {
    pub label: String,
    pub cells: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

/// An isomorphism found by search, with its inverse, objectwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub kind: String,
    pub subject: String,
    pub forward: Vec<Vec<Vec<String>>>,
    pub backward: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
    pub certificates: Vec<Certificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub problem: String,
    pub field: String,
    pub window: Window,
    pub seed: u64,
    pub passed: bool,
    pub failures: usize,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.suites.iter().flat_map(|s| s.checks.iter()).filter(|c| !c.passed)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.name == name)
    }

    /// Every table of every suite, in order.
    pub fn tables(&self) -> Vec<&Table> {
        self.suites.iter().flat_map(|s| s.tables.iter()).collect()
    }
}

pub fn report_to_json(r: &Report) -> String {
    serde_json::to_string_pretty(r).expect("reports serialize") + "\n"
}

pub fn emit_report(r: &Report, path: &Path) -> Result<(), HarnessError> {
    std::fs::write(path, report_to_json(r)).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

struct Log {
    suite: String,
    checks: Vec<Check>,
    tables: Vec<Table>,
    certificates: Vec<Certificate>,
}

#[derive(Clone, Copy, Default)]
struct At {
    pair: Option<[usize; 2]>,
    degree: Option<i64>,
    block: Option<i64>,
}

fn at() -> At {
    At::default()
}

impl At {
    fn pair(mut self, x: usize, y: usize) -> Self {
        self.pair = Some([x, y]);
        self
    }
    fn degree(mut self, t: i64) -> Self {
        self.degree = Some(t);
        self
    }
    fn block(mut self, j: i64) -> Self {
        self.block = Some(j);
        self
    }
}

impl Log {
    fn new(suite: &str) -> Self {
        Log {
            suite: suite.into(),
            checks: Vec::new(),
            tables: Vec::new(),
            certificates: Vec::new(),
        }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, at: At, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            location: Location {
                suite: self.suite.clone(),
                pair: at.pair,
                degree: at.degree,
                block: at.block,
            },
            detail: detail.into(),
        });
    }

    fn error(&mut self, name: impl Into<String>, at: At, e: impl std::fmt::Display) {
        self.check(name, false, at, e.to_string());
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            passed: self.checks.iter().all(|c| c.passed),
            name: self.suite,
            checks: self.checks,
            tables: self.tables,
            certificates: self.certificates,
        }
    }
}

fn matrix_cells<F: Field>(m: &Matrix<F>) -> Vec<Vec<String>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(|x| x.to_string()).collect()).collect()
}

fn certificate<F: Field>(kind: &str, subject: String, iso: &Isomorphism<F>) -> Certificate {
    Certificate {
        kind: kind.into(),
        subject,
        forward: iso.forward.comps.iter().flat_map(|m| [matrix_cells(m)]).collect(),
        backward: iso.backward.comps.iter().flat_map(|m| [matrix_cells(m)]).collect(),
    }
}

/// Shared state of one problem run; expensive pieces are built once, on demand.
struct Env<F: Field> {
    problem: Problem,
    q: Arc<FDCategory<F>>,
    a: Option<Arc<FDCategory<F>>>,
    stalks: Vec<Arc<Rep<F>>>,
    base: OnceLock<Result<Arc<DGWindow<F>>, DgError>>,
    direct: OnceLock<Result<Arc<DGWindow<F>>, DgError>>,
    transported: OnceLock<Result<Arc<TransportedDG<F>>, DgError>>,
}

impl<F: Field> Env<F> {
    fn new(ctx: F::Ctx, problem: &Problem) -> Result<Self, HarnessError> {
        let (q, a) = build_categories::<F>(ctx, problem)?;
        let stalks = (0..q.len()).map(|v| stalk(&q, v).map(Arc::new)).collect::<Result<_, _>>()?;
        Ok(Env {
            problem: problem.clone(),
            q,
            a,
            stalks,
            base: OnceLock::new(),
            direct: OnceLock::new(),
            transported: OnceLock::new(),
        })
    }

    fn name(&self, v: usize) -> String {
        format!("S_{}", self.q.objects()[v])
    }

    fn rng(&self, suite: &str) -> ChaCha8Rng {
        let salt = suite.bytes().fold(0u64, |h, b| h.wrapping_mul(131).wrapping_add(b as u64));
        ChaCha8Rng::seed_from_u64(self.problem.seed ^ salt)
    }

    fn resolutions(&self) -> Result<Vec<CompleteResolution<F>>, DgError> {
        self.stalks
            .iter()
            .map(|s| complete_resolution(s, self.problem.window).map_err(DgError::from))
            .collect()
    }

    fn base(&self) -> Result<Arc<DGWindow<F>>, DgError> {
        self.base.get_or_init(|| build_dgp(self.resolutions()?).map(Arc::new)).clone()
    }

    fn algebra(&self) -> Result<&Arc<FDCategory<F>>, DgError> {
        self.a
            .as_ref()
            .ok_or_else(|| DgError::Inconsistent("no algebra given".into()))
    }

    fn direct(&self) -> Result<Arc<DGWindow<F>>, DgError> {
        self.direct
            .get_or_init(|| {
                let a = self.algebra()?;
                let aq = Arc::new(tensor_with_algebra(a, &self.q).map_err(|e| DgError::Inconsistent(e.to_string()))?);
                let rs = self
                    .base()?
                    .objects
                    .iter()
                    .map(|r| tensor_resolution(a, &aq, r))
                    .collect::<Result<Vec<_>, _>>()?;
                build_dgp(rs).map(Arc::new)
            })
            .clone()
    }

    fn transported(&self) -> Result<Arc<TransportedDG<F>>, DgError> {
        self.transported
            .get_or_init(|| build_transported(self.algebra()?, &*self.base()?).map(Arc::new))
            .clone()
    }
}

fn dims_row(label: String, cells: impl IntoIterator<Item = usize>) -> TableRow {
    TableRow {
        label,
        cells: cells.into_iter().map(|d| d.to_string()).collect(),
    }
}

fn degree_columns(w: Window) -> Vec<String> {
    w.degrees().map(|t| t.to_string()).collect()
}

/// Smallest `p` in `1..=bound` with `Ω^p M ≅ M`, with a certificate.
fn syzygy_period<F: Field, R: Rng + ?Sized>(
    m: &Arc<Rep<F>>,
    bound: usize,
    rng: &mut R,
) -> Result<Option<(usize, Isomorphism<F>)>, ModuleError> {
    let mut cur = m.clone();
    for p in 1..=bound {
        cur = syzygy(&cur).0;
        if let Some(iso) = is_isomorphic(&cur, m, rng, DEFAULT_ISO_TRIALS)? {
            return Ok(Some((p, iso)));
        }
    }
    Ok(None)
}

fn suite_module_layer<F: Field>(env: &Env<F>, log: &mut Log) -> Result<(), HarnessError> {
    let q = &env.q;
    let n = q.len();
    let mut rng = env.rng(&log.suite);
    let si = check_self_injective(q)?;
    log.check(
        "self-injective",
        si.self_injective,
        match si.witness {
            Some((a, b)) => at().pair(a, b),
            None => at(),
        },
        match si.witness {
            Some((a, b)) => format!("Ext^1({}, P_{}) ≠ 0", env.name(a), q.objects()[b]),
            None => "Ext^1(S, P) = 0 for all stalks and representables".into(),
        },
    );
    let reps: Vec<Arc<Rep<F>>> = (0..n).map(|v| Arc::new(representable(q, v))).collect();
    let mut yoneda = Vec::new();
    for v in 0..n {
        let mut row = Vec::new();
        for (mname, m) in env
            .stalks
            .iter()
            .enumerate()
            .map(|(i, s)| (env.name(i), s))
            .chain(reps.iter().enumerate().map(|(i, p)| (format!("P_{}", q.objects()[i]), p)))
        {
            let h = hom_space(&reps[v], m)?.len();
            row.push(h);
            log.check(
                "yoneda",
                h == m.dim(v),
                at().pair(v, v),
                format!("dim Hom(P_{}, {mname}) = {h}, dim {mname}({}) = {}", q.objects()[v], q.objects()[v], m.dim(v)),
            );
        }
        yoneda.push(dims_row(format!("Hom(P_{}, -)", q.objects()[v]), row));
    }
    let mut columns: Vec<String> = (0..n).map(|i| env.name(i)).collect();
    columns.extend((0..n).map(|i| format!("P_{}", q.objects()[i])));
    log.tables.push(Table {
        name: "yoneda".into(),
        columns,
        rows: yoneda,
    });
    if !si.self_injective {
        return Ok(());
    }
    for v in 0..n {
        for w in 0..n {
            let d = stable_hom(&reps[v], &env.stalks[w])?.dim;
            log.check(
                "stable-hom-of-projective",
                d == 0,
                at().pair(v, w),
                format!("stable Hom(P_{}, {}) = {d}", q.objects()[v], env.name(w)),
            );
            let a = stable_hom(&env.stalks[v], &env.stalks[w])?.dim;
            let b = stable_hom_dim_via_envelope(&env.stalks[v], &env.stalks[w])?;
            log.check(
                "stable-hom-dual",
                a == b,
                at().pair(v, w),
                format!("via cover {a}, via envelope {b}"),
            );
        }
    }
    for (v, s) in env.stalks.iter().enumerate() {
        let cover = projective_cover(s);
        let (k, incl, _) = syzygy(s);
        let rad = radical_spans(&cover.projective);
        let minimal = (0..n).all(|o| {
            let r = &rad[o];
            incl.comps[o].columns().iter().all(|c| {
                crate::linalg::ColumnBasis::new(r.clone())
                    .map(|b| b.contains(c))
                    .unwrap_or(false)
            })
        });
        log.check(
            "cover-minimality",
            minimal && cover.epi.is_surjective() && cover.epi.is_natural(),
            at().pair(v, v),
            format!("kernel of the cover of {} has dims {:?} and lies in the radical", env.name(v), k.dims()),
        );
        if cover.projective.dims() == s.dims() {
            log.check("syzygy-period", true, at().pair(v, v), format!("{} is projective", env.name(v)));
            continue;
        }
        match syzygy_period(s, 2 * n + 2, &mut rng)? {
            Some((p, iso)) => {
                log.check(
                    "syzygy-period",
                    iso.verify(),
                    at().pair(v, v),
                    format!("Ω^{p} {} ≅ {}", env.name(v), env.name(v)),
                );
                log.certificates.push(certificate(
                    "syzygy-period",
                    format!("Ω^{p} {} ≅ {}", env.name(v), env.name(v)),
                    &iso,
                ));
            }
            None => log.check(
                "syzygy-period",
                false,
                at().pair(v, v),
                format!("no period up to {} found for {}", 2 * n + 2, env.name(v)),
            ),
        }
    }
    Ok(())
}

fn is_complex_valid<F: Field>(c: &Complex<F>) -> bool {
    let w = c.window();
    (w.lo..w.hi).all(|i| c.d(i + 1).mul(&c.d(i)).is_zero())
}

fn random_graded_map<F: Field, R: Rng + ?Sized>(
    s: &Arc<Complex<F>>,
    t: &Arc<Complex<F>>,
    degree: i64,
    rng: &mut R,
) -> Result<GradedMap<F>, HarnessError> {
    let h = hom_complex(s, t).map_err(DgError::from)?;
    let ctx = s.ctx();
    let v: Vec<F> = (0..h.complex.dim(degree)).map(|_| F::random(ctx, rng)).collect();
    Ok(h.to_map(degree, &v))
}

/// One randomized round of sign checks: `d∘d = 0` after tensor, shift and Hom,
/// graded Leibniz, the braiding, and additivity of shifts.
pub fn sign_calculus_case<F: Field, R: Rng + ?Sized>(ctx: F::Ctx, rng: &mut R) -> Result<Vec<(&'static str, bool)>, HarnessError> {
    let mut out = Vec::new();
    let win = |rng: &mut R| {
        let lo = rng.gen_range(-2..=1);
        Window {
            lo,
            hi: lo + rng.gen_range(1..=2),
        }
    };
    let wa = win(rng);
    let a = Arc::new(random_complex::<F, R>(ctx, rng, wa, 2));
    let wb = win(rng);
    let b = Arc::new(random_complex::<F, R>(ctx, rng, wb, 2));
    let wc = win(rng);
    let c = Arc::new(random_complex::<F, R>(ctx, rng, wc, 2));
    let ab = tensor(&a, &b).map_err(DgError::from)?;
    out.push(("tensor-square-zero", is_complex_valid(&ab)));
    let n = rng.gen_range(-3..=3);
    let m = rng.gen_range(-3..=3);
    out.push(("shift-square-zero", is_complex_valid(&shift(&a, n))));
    out.push(("shift-additive", shift(&shift(&a, n), m) == shift(&a, n + m)));
    let h = hom_complex(&a, &b).map_err(DgError::from)?;
    out.push(("hom-square-zero", is_complex_valid(&h.complex)));
    let s = rng.gen_range(-2..=2);
    let t = rng.gen_range(-2..=2);
    let f = random_graded_map(&a, &b, s, rng)?;
    let g = random_graded_map(&b, &c, t, rng)?;
    let gf = compose(&g, &f).map_err(DgError::from)?;
    let lhs = apply_partial(&gf);
    let r1 = compose(&apply_partial(&g), &f).map_err(DgError::from)?;
    let r2 = compose(&g, &apply_partial(&f)).map_err(DgError::from)?.scale(&F::sign(ctx, t));
    let rhs = r1.add(&r2).map_err(DgError::from)?;
    out.push(("leibniz", lhs.components == rhs.components));
    let tau = braiding(&a, &b).map_err(DgError::from)?;
    let back = braiding(&b, &a).map_err(DgError::from)?;
    let twice = compose(&back, &tau).map_err(DgError::from)?;
    let ab = Arc::new(ab);
    out.push(("braiding-involutive", twice.components == GradedMap::identity(ab).components));
    out.push(("braiding-chain-map", tau.is_cocycle()));
    Ok(out)
}

pub const SIGN_CALCULUS_ROUNDS: usize = 25;

fn suite_sign_calculus<F: Field>(env: &Env<F>, log: &mut Log) -> Result<(), HarnessError> {
    let mut rng = env.rng(&log.suite);
    let mut fails: BTreeMap<&str, usize> = BTreeMap::new();
    for _ in 0..SIGN_CALCULUS_ROUNDS {
        for (name, ok) in sign_calculus_case::<F, _>(env.q.ctx(), &mut rng)? {
            *fails.entry(name).or_default() += (!ok) as usize;
        }
    }
    for (name, f) in fails {
        log.check(name, f == 0, at(), format!("{f} of {SIGN_CALCULUS_ROUNDS} random cases failed"));
    }
    Ok(())
}

fn suite_lemma_psi<F: Field>(env: &Env<F>, log: &mut Log) -> Result<(), HarnessError> {
    let dg = env.base()?;
    let n = dg.len();
    let mut dg_rows = Vec::new();
    let mut oracle_rows = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let ps = psi(&dg, x, y)?;
            let failures = ps.map.differential_failures();
            let mut dims = Vec::new();
            let mut oracle = Vec::new();
            for t in dg.safe.degrees() {
                let h = dg.cohomology_dim(x, y, t)?;
                let om = dg.objects[x].omega(t).map_err(DgError::from)?.0.clone();
                let o = stable_hom(&om, dg.objects[y].base())?.dim;
                let bij = ps.on_cohomology(t)?.is_invertible();
                let chain = !failures.contains(&t) && !failures.contains(&(t - 1));
                log.check(
                    "psi-oracle",
                    h == o && bij && chain,
                    at().pair(x, y).degree(t),
                    format!(
                        "dim H^{t} Hom(P {}, P {}) = {h}, stable Hom(Ω^{t} {}, {}) = {o}, H(ψ) {}, ψ {}",
                        env.name(x),
                        env.name(y),
                        env.name(x),
                        env.name(y),
                        if bij { "bijective" } else { "not bijective" },
                        if chain { "commutes with ∂" } else { "fails to commute with ∂" }
                    ),
                );
                dims.push(h);
                oracle.push(o);
            }
            dg_rows.push(dims_row(format!("Hom(P {}, P {})", env.name(x), env.name(y)), dims));
            oracle_rows.push(dims_row(format!("stable Hom(Ω^i {}, {})", env.name(x), env.name(y)), oracle));
        }
    }
    log.tables.push(Table {
        name: "dim H^i of Hom-complexes".into(),
        columns: degree_columns(dg.safe),
        rows: dg_rows,
    });
    log.tables.push(Table {
        name: "stable Hom oracle".into(),
        columns: degree_columns(dg.safe),
        rows: oracle_rows,
    });
    Ok(())
}

fn unit_vector<F: Field>(ctx: F::Ctx, n: usize, i: usize) -> Vec<F> {
    (0..n).map(|k| if k == i { F::one(ctx) } else { F::zero(ctx) }).collect()
}

fn random_vector<F: Field, R: Rng + ?Sized>(ctx: F::Ctx, n: usize, rng: &mut R) -> Vec<F> {
    (0..n).map(|_| F::random(ctx, rng)).collect()
}

const COMPOSITION_RANGE: i64 = 2;
const RHO_SAMPLES: usize = 3;

fn suite_lemma_rho<F: Field>(env: &Env<F>, log: &mut Log) -> Result<(), HarnessError> {
    let a = env.algebra()?.clone();
    let base = env.base()?;
    let direct = env.direct()?;
    let tr = env.transported()?;
    let ctx = a.ctx();
    let da = a.dim(0, 0);
    let n = base.len();
    let mut rng = env.rng(&log.suite);
    let mut rhos = BTreeMap::new();
    for x in 0..n {
        for y in 0..n {
            let g = tr.hom(x, y);
            let r = rho(g, direct.hom(x, y))?;
            for t in base.hom(x, y).window().degrees() {
                let bij = r.is_bijective_at(t);
                log.check(
                    "rho-bijective",
                    bij,
                    at().pair(x, y).degree(t),
                    format!("{}x{} matrix", r.matrix(t).rows(), r.matrix(t).cols()),
                );
            }
            let failures = r.differential_failures();
            log.check(
                "rho-differential",
                failures.is_empty(),
                at().pair(x, y),
                format!("degrees where ρ∂ ≠ ∂ρ: {failures:?}"),
            );
            // decode ρ(e_α ⊗ f) through the direct basis and compare with b ⊗ v ↦ αb ⊗ f(v)
            let h = base.hom(x, y);
            let d = direct.hom(x, y);
            let mut explicit = true;
            for t in -1..=1 {
                let m = r.matrix(t);
                for b in h.blocks(t) {
                    let (hq, hd) = (h.hom(b.j, t + b.j).expect("block"), d.hom(b.j, t + b.j).expect("block"));
                    let db = d.block(t, b.j).expect("block");
                    for alpha in 0..da {
                        for (k, f) in hq.basis.iter().enumerate() {
                            let col = m.column(da * b.offset + alpha * b.dim + k);
                            let map = hd.combination(&col[db.offset..db.offset + db.dim]);
                            explicit &= map.is_natural();
                            for (v, fv) in f.comps.iter().enumerate() {
                                for beta in 0..da {
                                    let ab = a.compose(0, 0, 0, &a.basis_vector(0, 0, alpha), &a.basis_vector(0, 0, beta));
                                    for xi in 0..fv.cols() {
                                        let input = unit_vector::<F>(ctx, da * fv.cols(), beta * fv.cols() + xi);
                                        let expected: Vec<F> = ab
                                            .iter()
                                            .flat_map(|c| fv.column(xi).into_iter().map(move |e| c.clone() * e))
                                            .collect();
                                        explicit &= map.comps[v].mul_vec(&input) == expected;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            log.check(
                "rho-explicit-basis",
                explicit,
                at().pair(x, y),
                "ρ(a ⊗ f) sends b ⊗ v to ab ⊗ f(v) and is natural over A⊗Q",
            );
            rhos.insert((x, y), r);
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let (gf, gg, go) = (tr.hom(x, y), tr.hom(y, z), tr.hom(x, z));
                let (df, dgm, dout) = (direct.hom(x, y), direct.hom(y, z), direct.hom(x, z));
                let (rf, rg, ro) = (&rhos[&(x, y)], &rhos[&(y, z)], &rhos[&(x, z)]);
                let mut bad = 0;
                let mut total = 0;
                for s in -COMPOSITION_RANGE..=COMPOSITION_RANGE {
                    for t in -COMPOSITION_RANGE..=COMPOSITION_RANGE {
                        for _ in 0..RHO_SAMPLES {
                            let fv = random_vector::<F, _>(ctx, gf.complex.dim(t), &mut rng);
                            let gv = random_vector::<F, _>(ctx, gg.complex.dim(s), &mut rng);
                            let lhs = ro.matrix(s + t).mul_vec(&go.compose_vectors(gg, s, &gv, gf, t, &fv));
                            let rhs = dout.compose_vectors(dgm, s, &rg.matrix(s).mul_vec(&gv), df, t, &rf.matrix(t).mul_vec(&fv));
                            total += 1;
                            bad += (lhs != rhs) as usize;
                        }
                    }
                }
                log.check(
                    "rho-composition",
                    bad == 0,
                    at().pair(x, z).block(y as i64),
                    format!("{bad} of {total} sampled pairs through {} break ρ(g∘f) = ρ(g)∘ρ(f)", env.name(y)),
                );
            }
        }
    }
    Ok(())
}

fn suite_dg_functor<F: Field>(env: &Env<F>, log: &mut Log) -> Result<(), HarnessError> {
    let a = env.algebra()?.clone();
    let base = env.base()?;
    let tr = env.transported()?;
    let ctx = a.ctx();
    let n = base.len();
    let mut phis = BTreeMap::new();
    for x in 0..n {
        for y in 0..n {
            let p = phi(tr.hom(x, y))?;
            let failures = p.map.differential_failures();
            log.check(
                "phi-differential",
                failures.is_empty(),
                at().pair(x, y),
                format!("degrees where φ∂ ≠ ∂φ: {failures:?}"),
            );
            let bad: Vec<i64> = base.hom(x, y).window().degrees().filter(|&t| !p.map.is_bijective_at(t)).collect();
            log.check(
                "phi-bijective",
                bad.is_empty(),
                at().pair(x, y),
                format!("degrees where φ is not bijective: {bad:?}"),
            );
            let g = tr.hom(x, y);
            let dd = (g.complex.window().lo..g.complex.window().hi)
                .all(|t| g.complex.d(t + 1).mul(&g.complex.d(t)).is_zero());
            log.check("transported-square-zero", dd, at().pair(x, y), "∂∘∂ = 0 on the transported Hom");
            phis.insert((x, y), p);
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let (hf, hg, ho) = (base.hom(x, y), base.hom(y, z), base.hom(x, z));
                let (gf, gg, go) = (tr.hom(x, y), tr.hom(y, z), tr.hom(x, z));
                let (pf, pg, po) = (&phis[&(x, y)], &phis[&(y, z)], &phis[&(x, z)]);
                for s in -COMPOSITION_RANGE..=COMPOSITION_RANGE {
                    for t in -COMPOSITION_RANGE..=COMPOSITION_RANGE {
                        let (ns, nt) = (pg.source.dim(s), pf.source.dim(t));
                        let mut bad = 0;
                        for i in 0..ns {
                            let gv = unit_vector::<F>(ctx, ns, i);
                            let pgv = pg.map.matrix(s).mul_vec(&gv);
                            for k in 0..nt {
                                let fv = unit_vector::<F>(ctx, nt, k);
                                let lhs = po.map.matrix(s + t).mul_vec(&compose_algebra_tensor(&a, ho, hg, s, &gv, hf, t, &fv));
                                let rhs = go.compose_vectors(gg, s, &pgv, gf, t, &pf.map.matrix(t).mul_vec(&fv));
                                bad += (lhs != rhs) as usize;
                            }
                        }
                        log.check(
                            "phi-composition",
                            bad == 0,
                            at().pair(x, z).degree(s + t).block(y as i64),
                            format!("{bad} of {} basis pairs in degrees ({s}, {t}) break φ(g∘f) = φ(g)∘φ(f)", ns * nt),
                        );
                    }
                }
            }
        }
    }
    Ok(())
}

fn suite_main_theorem<F: Field>(env: &Env<F>, log: &mut Log) -> Result<(), HarnessError> {
    let a = env.algebra()?.clone();
    let base = env.base()?;
    let direct = env.direct()?;
    let tr = env.transported()?;
    let da = a.dim(0, 0);
    let n = base.len();
    let mut rows = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let sq = verify_key_square(&a, &base, &tr, &direct, x, y)?;
            for d in &sq.degrees {
                log.check(
                    "key-square",
                    d.discrepancy == 0,
                    at().pair(x, y).degree(d.degree),
                    format!("{} differing entries", d.discrepancy),
                );
            }
            let w = base.hom(x, y).window();
            log.check(
                "phi-rho-bijective",
                w.degrees().all(|t| sq.phi.map.is_bijective_at(t) && sq.rho.is_bijective_at(t)),
                at().pair(x, y),
                "φ and ρ are invertible in every degree",
            );
            log.check(
                "phi-rho-differential",
                sq.phi.map.commutes_with_differentials() && sq.rho.commutes_with_differentials(),
                at().pair(x, y),
                "φ and ρ commute with ∂",
            );
            let mut cells = Vec::new();
            for t in base.safe.degrees() {
                let hb = base.cohomology_dim(x, y, t)?;
                let hd = direct.cohomology_dim(x, y, t)?;
                log.check(
                    "cohomology-scales",
                    hd == da * hb,
                    at().pair(x, y).degree(t),
                    format!("dim H^{t} over A⊗Q = {hd}, dim A · dim H^{t} over Q = {da} · {hb}"),
                );
                cells.push(hd);
            }
            rows.push(dims_row(format!("Hom(A⊗P {}, A⊗P {})", env.name(x), env.name(y)), cells));
        }
    }
    log.tables.push(Table {
        name: "dim H^i over A⊗Q".into(),
        columns: degree_columns(base.safe),
        rows,
    });
    Ok(())
}

fn ring_tables<F: Field>(env: &Env<F>, er: &EndRing<F>) -> Vec<Table> {
    let x = er.object;
    let h = Table {
        name: format!("dim H^i End(P {})", env.name(x)),
        columns: er.degrees.iter().map(|t| t.to_string()).collect(),
        rows: vec![dims_row("dim".into(), er.degrees.iter().map(|t| er.dims[t]))],
    };
    let products = Table {
        name: format!("products H^s × H^t -> H^(s+t) of End(P {})", env.name(x)),
        columns: er.degrees.iter().map(|t| t.to_string()).collect(),
        rows: er
            .degrees
            .iter()
            .map(|&s| TableRow {
                label: s.to_string(),
                cells: er
                    .degrees
                    .iter()
                    .map(|&t| match er.products.get(&(s, t)) {
                        None => "unavailable".into(),
                        Some(p) if p.iter().flatten().flatten().all(|v| v.is_zero()) => "0".into(),
                        Some(p) => format_constants(p),
                    })
                    .collect(),
            })
            .collect(),
    };
    vec![h, products]
}

/// Structure constants `c[i][j][k]` (basis `i` of `H^s` times basis `j` of `H^t`, coordinate `k`).
fn format_constants<F: Field>(c: &[Vec<Vec<F>>]) -> String {
    if let [row] = c {
        if let [v] = row.as_slice() {
            if let [x] = v.as_slice() {
                return x.to_string();
            }
        }
    }
    let join = |v: &[F]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    c.iter()
        .map(|row| row.iter().map(|v| format!("({})", join(v))).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("; ")
}

fn suite_m_periodic<F: Field>(env: &Env<F>, log: &mut Log) -> Result<(), HarnessError> {
    let dg = env.base()?;
    let m = env.q.len() as i64;
    let mut rng = env.rng(&log.suite);
    let span = Window { lo: -m, hi: m };
    let Some(degs) = dg.safe.intersect(&span) else {
        log.check("window", false, at(), format!("safe range {} misses [{}, {}]", dg.safe, -m, m));
        return Ok(());
    };
    log.check(
        "window",
        degs == span,
        at(),
        format!(
            "safe range {} {} [{}, {}]",
            dg.safe,
            if degs == span { "covers" } else { "does not cover" },
            -m,
            m
        ),
    );
    let degrees: Vec<i64> = degs.degrees().collect();
    for x in 0..dg.len() {
        let er = end_ring(&dg, x, &degrees, &mut rng)?;
        for &t in &degrees {
            let expect = (t.rem_euclid(m) == 0) as usize;
            log.check(
                "laurent-dimension",
                er.dims[&t] == expect,
                at().pair(x, x).degree(t),
                format!("dim H^{t} = {}, expected {expect}", er.dims[&t]),
            );
        }
        if degs == span {
            for (s, t) in [(m, -m), (-m, m)] {
                let u = er.unit_scalar(s, t);
                log.check(
                    "generator-inverse",
                    u.is_some(),
                    at().pair(x, x).degree(s),
                    match &u {
                        Some(l) => format!("u_{s} · u_{t} = {l} · 1, so u_{s} is invertible"),
                        None => format!("u_{s} · u_{t} is not a nonzero multiple of 1"),
                    },
                );
            }
        }
        log.check(
            "representative-independence",
            er.representative_independent,
            at().pair(x, x),
            "structure constants agree after perturbing representatives by coboundaries",
        );
        log.tables.extend(ring_tables(env, &er));
    }
    Ok(())
}

/// Is the shape an oriented cycle `i -> i+1` through all vertices?
fn cyclic_order(shape: &QuiverPresentation) -> Option<Vec<usize>> {
    let m = shape.vertices.len();
    if shape.arrows.len() != m {
        return None;
    }
    let idx = |v: &str| shape.vertices.iter().position(|w| w == v);
    let mut next = vec![None; m];
    for a in &shape.arrows {
        let (s, t) = (idx(&a.source)?, idx(&a.target)?);
        if next[s].replace(t).is_some() {
            return None;
        }
    }
    let mut order = vec![0];
    while order.len() < m {
        let n = next[*order.last()?]?;
        if order.contains(&n) {
            return None;
        }
        order.push(n);
    }
    (next[*order.last()?]? == 0).then_some(order)
}

fn suite_ikm<F: Field>(env: &Env<F>, log: &mut Log) -> Result<(), HarnessError> {
    let q = &env.q;
    let Some(order) = cyclic_order(&env.problem.shape) else {
        log.check("n-complex-shape", false, at(), "the shape is not an oriented cycle");
        return Ok(());
    };
    let m = order.len();
    let nn = representable(q, 0).total_dim();
    log.check(
        "n-complex-shape",
        (0..m).all(|v| representable(q, v).total_dim() == nn),
        at(),
        format!("oriented {m}-cycle with ∂^{nn} = 0"),
    );
    let mut rng = env.rng(&log.suite);
    let pos = |v: usize| order.iter().position(|&w| w == v).expect("vertex on the cycle");
    for v in 0..m {
        let om2 = syzygy(&syzygy(&env.stalks[v]).0).0;
        let w = order[(pos(v) + m * nn - nn % m) % m];
        let iso = is_isomorphic(&om2, &env.stalks[w], &mut rng, DEFAULT_ISO_TRIALS)?;
        log.check(
            "double-syzygy-shift",
            iso.as_ref().is_some_and(|i| i.verify()),
            at().pair(v, w),
            format!("Ω² {} ≅ {}", env.name(v), env.name(w)),
        );
        if let Some(i) = iso {
            log.certificates.push(certificate("double-syzygy", format!("Ω² {} ≅ {}", env.name(v), env.name(w)), &i));
        }
    }
    let dg = env.base()?;
    let mut rows = Vec::new();
    for x in 0..m {
        for y in 0..m {
            let mut cells = Vec::new();
            for t in dg.safe.degrees() {
                let h = dg.cohomology_dim(x, y, t)?;
                let om = dg.objects[x].omega(t).map_err(DgError::from)?.0.clone();
                let o = stable_hom(&om, dg.objects[y].base())?.dim;
                log.check(
                    "hom-oracle",
                    h == o,
                    at().pair(x, y).degree(t),
                    format!("dim H^{t} = {h}, stable Hom = {o}"),
                );
                cells.push(h);
            }
            rows.push(dims_row(format!("Hom(P {}, P {})", env.name(x), env.name(y)), cells));
        }
    }
    log.tables.push(Table {
        name: "dim H^i of Hom-complexes".into(),
        columns: degree_columns(dg.safe),
        rows,
    });
    Ok(())
}

fn suite_non_formality<F: Field>(env: &Env<F>, log: &mut Log) -> Result<(), HarnessError> {
    let dg = env.base()?;
    if dg.len() != 1 {
        log.check("one-object", false, at(), "the shape must have a single vertex");
        return Ok(());
    }
    let span = Window { lo: -2, hi: 2 };
    if !dg.safe.contains_window(&span) {
        log.check("window", false, at(), format!("safe range {} misses [-2, 2]", dg.safe));
        return Ok(());
    }
    let mut rng = env.rng(&log.suite);
    let degrees: Vec<i64> = span.degrees().collect();
    let er = end_ring(&dg, 0, &degrees, &mut rng)?;
    for &t in &degrees {
        log.check("dimension", er.dims[&t] == 1, at().pair(0, 0).degree(t), format!("dim H^{t} = {}", er.dims[&t]));
    }
    log.check(
        "odd-square-vanishes",
        er.product_is_zero(1, 1) == Some(true),
        at().pair(0, 0).degree(2),
        "H^1 × H^1 -> H^2 is zero",
    );
    log.check(
        "degree-two-nonzero",
        er.dims[&2] > 0 && er.unit_scalar(2, -2).is_some(),
        at().pair(0, 0).degree(2),
        "H^2 ≠ 0 and its generator is invertible",
    );
    log.check(
        "degree-one-not-invertible",
        er.unit_scalar(1, -1).is_none(),
        at().pair(0, 0).degree(1),
        "the degree-1 class has no inverse",
    );
    log.check(
        "representative-independence",
        er.representative_independent,
        at().pair(0, 0),
        "structure constants agree after perturbing representatives by coboundaries",
    );
    log.tables.extend(ring_tables(env, &er));
    Ok(())
}

fn run_suite<F: Field>(env: &Env<F>, name: &str) -> Result<SuiteReport, HarnessError> {
    let mut log = Log::new(name);
    let r = match name {
        "module-layer" => suite_module_layer(env, &mut log),
        "sign-calculus" => suite_sign_calculus(env, &mut log),
        "lemma-psi" => suite_lemma_psi(env, &mut log),
        "lemma-rho" => suite_lemma_rho(env, &mut log),
        "dg-functor" => suite_dg_functor(env, &mut log),
        "main-theorem" => suite_main_theorem(env, &mut log),
        "m-periodic" => suite_m_periodic(env, &mut log),
        "ikm" => suite_ikm(env, &mut log),
        "non-formality" => suite_non_formality(env, &mut log),
        other => return Err(HarnessError::UnknownSuite(other.into())),
    };
    match r {
        Ok(()) => {}
        // a precondition that fails inside a suite is a hard error
        Err(HarnessError::Module(e @ ModuleError::NotSelfInjective { .. })) => return Err(e.into()),
        Err(HarnessError::Dg(DgError::Module(e @ ModuleError::NotSelfInjective { .. }))) => return Err(e.into()),
        Err(e) => log.error("suite-error", at(), e),
    }
    Ok(log.finish())
}

fn assemble(problem: &Problem, suites: Vec<SuiteReport>) -> Report {
    let failures = suites.iter().flat_map(|s| &s.checks).filter(|c| !c.passed).count();
    Report {
        schema_version: SCHEMA_VERSION,
        problem: problem.name.clone(),
        field: field_name(problem.field),
        window: problem.window,
        seed: problem.seed,
        passed: failures == 0,
        failures,
        suites,
    }
}

pub fn field_name(f: FieldSpec) -> String {
    match f {
        FieldSpec::Prime(p) => format!("F_{p}"),
        FieldSpec::Rationals => "Q".into(),
    }
}

fn require_self_injective<F: Field>(env: &Env<F>, suites: &[String]) -> Result<(), HarnessError> {
    if suites.iter().any(|s| s != "sign-calculus" && s != "module-layer") {
        crate::modules::require_self_injective(&env.q)?;
    }
    Ok(())
}

fn run_generic<F: Field>(ctx: F::Ctx, p: &Problem) -> Result<Report, HarnessError> {
    let env = Env::<F>::new(ctx, p)?;
    require_self_injective(&env, &p.suites)?;
    let suites = p
        .suites
        .par_iter()
        .map(|s| run_suite(&env, s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble(p, suites))
}

/// Runs every suite of the problem. Suites run concurrently and are merged in the listed order.
pub fn run_problem(p: &Problem) -> Result<Report, HarnessError> {
    validate_problem(p)?;
    match p.field {
        FieldSpec::Prime(q) => run_generic::<Fp>(Prime::new(q)?, p),
        FieldSpec::Rationals => run_generic::<Rational>((), p),
    }
}

fn with_env<T>(
    p: &Problem,
    fp: impl FnOnce(&Env<Fp>) -> Result<T, HarnessError>,
    q: impl FnOnce(&Env<Rational>) -> Result<T, HarnessError>,
) -> Result<T, HarnessError> {
    validate_problem(p)?;
    match p.field {
        FieldSpec::Prime(m) => fp(&Env::new(Prime::new(m)?, p)?),
        FieldSpec::Rationals => q(&Env::new((), p)?),
    }
}

fn resolve_generic<F: Field>(env: &Env<F>) -> Result<Report, HarnessError> {
    crate::modules::require_self_injective(&env.q)?;
    let mut log = Log::new("resolve");
    let q = &env.q;
    for (v, s) in env.stalks.iter().enumerate() {
        let r = complete_resolution(s, env.problem.window).map_err(DgError::from)?;
        let w = r.window();
        log.tables.push(Table {
            name: format!("P {}", env.name(v)),
            columns: degree_columns(w),
            rows: vec![
                TableRow {
                    label: "summands".into(),
                    cells: w
                        .degrees()
                        .map(|j| {
                            let l = r.labels(j).expect("in window");
                            if l.is_empty() {
                                "0".into()
                            } else {
                                l.iter().map(|&o| format!("P_{}", q.objects()[o])).collect::<Vec<_>>().join("+")
                            }
                        })
                        .collect(),
                },
                dims_row("total dim".into(), w.degrees().map(|j| r.component(j).expect("in window").total_dim())),
            ],
        });
        log.check("exact", r.is_exact(), at().pair(v, v), "exact at every interior degree");
        log.check("square-zero", r.squares_to_zero(), at().pair(v, v), "d∘d = 0");
        log.check(
            "minimal",
            r.is_minimal() || r.is_degenerate(),
            at().pair(v, v),
            if r.is_degenerate() {
                "projective base, so the resolution is degenerate"
            } else {
                "im d lies in rad P"
            },
        );
        log.check("labels", r.labels_match(), at().pair(v, v), "components are the labelled sums of representables");
    }
    Ok(assemble(&env.problem, vec![log.finish()]))
}

/// Components of the complete resolution of every stalk.
pub fn resolve(p: &Problem) -> Result<Report, HarnessError> {
    with_env(p, resolve_generic, resolve_generic)
}

fn endring_generic<F: Field>(env: &Env<F>) -> Result<Report, HarnessError> {
    crate::modules::require_self_injective(&env.q)?;
    let mut log = Log::new("endring");
    let dg = env.base()?;
    let mut rng = env.rng("endring");
    let degrees: Vec<i64> = dg.safe.degrees().collect();
    for x in 0..dg.len() {
        let er = end_ring(&dg, x, &degrees, &mut rng)?;
        log.check(
            "representative-independence",
            er.representative_independent,
            at().pair(x, x),
            "structure constants agree after perturbing representatives by coboundaries",
        );
        log.check(
            "identity",
            er.identity.iter().any(|c| !c.is_zero()),
            at().pair(x, x).degree(0),
            "the identity class is nonzero",
        );
        log.tables.extend(ring_tables(env, &er));
    }
    Ok(assemble(&env.problem, vec![log.finish()]))
}

/// Cohomology dimensions and products of every stalk's endomorphism ring on the safe range.
pub fn endring(p: &Problem) -> Result<Report, HarnessError> {
    with_env(p, endring_generic, endring_generic)
}

fn homtable_generic<F: Field>(env: &Env<F>) -> Result<Report, HarnessError> {
    crate::modules::require_self_injective(&env.q)?;
    let mut log = Log::new("homtable");
    let w = env.problem.window;
    let n = env.stalks.len();
    let mut rows = Vec::new();
    for x in 0..n {
        let r = complete_resolution(&env.stalks[x], w).map_err(DgError::from)?;
        let degs = Window { lo: 1 - w.hi, hi: -w.lo };
        for y in 0..n {
            let mut cells = Vec::new();
            for t in degs.degrees() {
                let om = r.omega(t).map_err(DgError::from)?.0.clone();
                let a = stable_hom(&om, &env.stalks[y])?.dim;
                let b = stable_hom_dim_via_envelope(&om, &env.stalks[y])?;
                log.check(
                    "cover-envelope-agree",
                    a == b,
                    at().pair(x, y).degree(t),
                    format!("stable Hom(Ω^{t} {}, {}) = {a} via covers, {b} via envelopes", env.name(x), env.name(y)),
                );
                cells.push(a);
            }
            rows.push(dims_row(format!("stable Hom(Ω^i {}, {})", env.name(x), env.name(y)), cells));
        }
        if x + 1 == n {
            log.tables.push(Table {
                name: "stable Hom oracle".into(),
                columns: degree_columns(degs),
                rows: std::mem::take(&mut rows),
            });
        }
    }
    Ok(assemble(&env.problem, vec![log.finish()]))
}

/// `dim stable Hom(Ω^i S_x, S_y)` for every degree the resolution window reaches.
pub fn homtable(p: &Problem) -> Result<Report, HarnessError> {
    with_env(p, homtable_generic, homtable_generic)
}

#[allow(dead_code)]
fn zero_map<F: Field>(m: &Arc<Rep<F>>) -> RepMap<F> {
    RepMap::zero(m.clone(), m.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load() {
        for (name, _) in FIXTURES {
            let p = fixture(name).unwrap();
            assert_eq!(&p.name, name);
        }
        let p = fixture("cyclic2").unwrap();
        assert_eq!((p.shape.vertices.len(), p.shape.arrows.len(), p.shape.relations.len()), (2, 2, 2));
    }

    #[test]
    fn problem_round_trip() {
        for (name, _) in FIXTURES {
            let p = fixture(name).unwrap();
            assert_eq!(parse_problem(&problem_to_json(&p)).unwrap(), p);
        }
    }

    #[test]
    fn unknown_arrow_is_a_schema_violation() {
        let text = FIXTURES[0].1.replacen("\"a\",\n            \"b\"", "\"zz\",\n            \"b\"", 1);
        assert_ne!(text, FIXTURES[0].1);
        match parse_problem(&text) {
            Err(HarnessError::SchemaViolation { message, .. }) => assert!(message.contains("zz")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse_problem("{\n  \"schema_version\": 1,\n  oops\n}") {
            Err(HarnessError::ParseError { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_types_name_the_field() {
        let text = FIXTURES[0].1.replacen("\"lo\": -4", "\"lo\": \"x\"", 1);
        match parse_problem(&text) {
            Err(HarnessError::SchemaViolation { field, .. }) => assert_eq!(field, "window.lo"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_suite() {
        let mut p = fixture("cyclic2").unwrap();
        p.suites.push("nope".into());
        assert!(matches!(validate_problem(&p), Err(HarnessError::UnknownSuite(_))));
    }

    #[test]
    fn dg_suites_need_wide_windows() {
        let mut p = fixture("cyclic2").unwrap();
        p.window = Window { lo: -2, hi: 2 };
        assert!(matches!(validate_problem(&p), Err(HarnessError::SchemaViolation { .. })));
    }

    #[test]
    fn non_self_injective_shape_is_rejected() {
        let mut p = fixture("cyclic3").unwrap();
        p.shape = QuiverPresentation::linear_a2();
        assert!(matches!(
            run_problem(&p),
            Err(HarnessError::Module(ModuleError::NotSelfInjective { .. }))
        ));
    }

    #[test]
    fn cyclic_order_detects_cycles() {
        assert_eq!(cyclic_order(&QuiverPresentation::cyclic(3, 2)), Some(vec![0, 1, 2]));
        assert_eq!(cyclic_order(&QuiverPresentation::linear_a2()), None);
    }
}
