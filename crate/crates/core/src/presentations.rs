//! Finite-dimensional k-categories presented by quivers with relations.
//!
//! A path written `[a, b]` means "a then b", the composite `b∘a`. A
//! presentation with bound `L - 1` describes `kQ / (I + J^{L+1})`: paths
//! longer than `L` are zero, and every path of length exactly `L` must already
//! lie in the relation ideal, otherwise the bound is reported as too small.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FieldError, PresentationError};
use crate::field::Field;
use crate::linalg::{ColumnBasis, Matrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Arrow {
    pub name: String,
    pub source: String,
    pub target: String,
}

/// An integer, or a string such as `"-3"` or `"1/2"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Int(i64),
    Text(String),
}

impl Coefficient {
    pub fn to_field<F: Field>(&self, ctx: F::Ctx) -> Result<F, FieldError> {
        let (num, den) = match self {
            Coefficient::Int(n) => (*n, 1),
            Coefficient::Text(s) => {
                let bad = || FieldError::Unparseable(s.clone());
                match s.split_once('/') {
                    Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
                    None => (s.trim().parse().map_err(|_| bad())?, 1),
                }
            }
        };
        F::from_ratio(ctx, num, den).ok_or_else(|| FieldError::BadDenominator(format!("{self:?}")))
    }
}

impl From<i64> for Coefficient {
    fn from(n: i64) -> Self {
        Coefficient::Int(n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coefficient: Coefficient,
    pub path: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverPresentation {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
    #[serde(default)]
    pub relations: Vec<Vec<Term>>,
    #[serde(alias = "path_length_bound")]
    pub bound: usize,
}

impl QuiverPresentation {
    /// The cyclic quiver `0 -> 1 -> ... -> m-1 -> 0` with every path of length `n` set to zero.
    pub fn cyclic(m: usize, n: usize) -> Self {
        let vertices: Vec<String> = (0..m).map(|i| i.to_string()).collect();
        let names: Vec<String> = if m == 2 {
            vec!["a".into(), "b".into()]
        } else {
            (0..m).map(|i| format!("d{i}")).collect()
        };
        let arrows = (0..m)
            .map(|i| Arrow {
                name: names[i].clone(),
                source: vertices[i].clone(),
                target: vertices[(i + 1) % m].clone(),
            })
            .collect();
        let relations = (0..m)
            .map(|start| {
                vec![Term {
                    coefficient: 1.into(),
                    path: (0..n).map(|k| names[(start + k) % m].clone()).collect(),
                }]
            })
            .collect();
        QuiverPresentation {
            vertices,
            arrows,
            relations,
            bound: n,
        }
    }

    /// One vertex with a loop `d` and the relation `d^n = 0`.
    pub fn truncated_polynomial(n: usize) -> Self {
        QuiverPresentation {
            vertices: vec!["*".into()],
            arrows: vec![Arrow {
                name: "d".into(),
                source: "*".into(),
                target: "*".into(),
            }],
            relations: vec![vec![Term {
                coefficient: 1.into(),
                path: vec!["d".into(); n],
            }]],
            bound: n,
        }
    }

    /// `0 -> 1` with no relations.
    pub fn linear_a2() -> Self {
        QuiverPresentation {
            vertices: vec!["0".into(), "1".into()],
            arrows: vec![Arrow {
                name: "x".into(),
                source: "0".into(),
                target: "1".into(),
            }],
            relations: Vec::new(),
            bound: 1,
        }
    }

    /// Names, endpoints and relation paths refer to declared things.
    pub fn validate_names(&self) -> Result<(), PresentationError> {
        let mut seen = HashMap::new();
        for v in &self.vertices {
            if seen.insert(v.as_str(), ()).is_some() {
                return Err(PresentationError::Duplicate(v.clone()));
            }
        }
        let mut arrows = HashMap::new();
        for a in &self.arrows {
            for end in [&a.source, &a.target] {
                if !seen.contains_key(end.as_str()) {
                    return Err(PresentationError::UnknownVertex(end.clone()));
                }
            }
            if arrows.insert(a.name.as_str(), ()).is_some() {
                return Err(PresentationError::Duplicate(a.name.clone()));
            }
        }
        for rel in &self.relations {
            for term in rel {
                for name in &term.path {
                    if !arrows.contains_key(name.as_str()) {
                        return Err(PresentationError::UnknownArrow(name.clone()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Structure constants of `Q(b,c) × Q(a,b) -> Q(a,c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct CompTable<F: Field> {
    out: usize,
    g: usize,
    f: usize,
    data: Vec<F>,
}

impl<F: Field> CompTable<F> {
    fn entry(&self, gi: usize, fi: usize) -> &[F] {
        let start = (gi * self.f + fi) * self.out;
        &self.data[start..start + self.out]
    }
}

/// A finite-dimensional k-category with chosen bases of all morphism spaces.
///
/// `Q(s, t)` denotes morphisms `s -> t`. Morphisms are coordinate vectors in
/// the stored basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FDCategory<F: Field> {
    ctx: F::Ctx,
    objects: Vec<String>,
    labels: Vec<Vec<String>>,
    comp: Vec<CompTable<F>>,
    units: Vec<Vec<F>>,
    radical: Vec<Matrix<F>>,
}

impl<F: Field> fmt::Display for FDCategory<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "category on {:?} with hom dims", self.objects)?;
        for s in 0..self.len() {
            for t in 0..self.len() {
                write!(f, " ({s},{t})={}", self.dim(s, t))?;
            }
        }
        Ok(())
    }
}

impl<F: Field> FDCategory<F> {
    /// Assemble a category from a composition function on basis elements.
    ///
    /// `compose(a, b, c, gi, fi)` returns the coordinates of `g∘f` in `Q(a, c)`.
    pub fn from_fn(
        ctx: F::Ctx,
        objects: Vec<String>,
        labels: Vec<Vec<String>>,
        units: Vec<Vec<F>>,
        radical: Vec<Matrix<F>>,
        mut compose: impl FnMut(usize, usize, usize, usize, usize) -> Vec<F>,
    ) -> Self {
        let n = objects.len();
        assert_eq!(labels.len(), n * n);
        assert_eq!(units.len(), n);
        assert_eq!(radical.len(), n * n);
        let mut comp = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (out, g, f) = (labels[a * n + c].len(), labels[b * n + c].len(), labels[a * n + b].len());
                    let mut data = Vec::with_capacity(out * g * f);
                    for gi in 0..g {
                        for fi in 0..f {
                            let v = compose(a, b, c, gi, fi);
                            assert_eq!(v.len(), out);
                            data.extend(v);
                        }
                    }
                    comp.push(CompTable { out, g, f, data });
                }
            }
        }
        FDCategory {
            ctx,
            objects,
            labels,
            comp,
            units,
            radical,
        }
    }

    pub fn ctx(&self) -> F::Ctx {
        self.ctx
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn dim(&self, s: usize, t: usize) -> usize {
        self.labels[s * self.len() + t].len()
    }

    pub fn labels(&self, s: usize, t: usize) -> &[String] {
        &self.labels[s * self.len() + t]
    }

    pub fn unit(&self, q: usize) -> &[F] {
        &self.units[q]
    }

    /// Columns span the radical part of `Q(s, t)`.
    pub fn radical(&self, s: usize, t: usize) -> &Matrix<F> {
        &self.radical[s * self.len() + t]
    }

    pub fn basis_vector(&self, s: usize, t: usize, i: usize) -> Vec<F> {
        let mut v = vec![F::zero(self.ctx); self.dim(s, t)];
        v[i] = F::one(self.ctx);
        v
    }

    fn table(&self, a: usize, b: usize, c: usize) -> &CompTable<F> {
        let n = self.len();
        &self.comp[(a * n + b) * n + c]
    }

    /// `g∘f` for basis elements `g ∈ Q(b,c)`, `f ∈ Q(a,b)`.
    pub fn compose_basis(&self, a: usize, b: usize, c: usize, gi: usize, fi: usize) -> &[F] {
        self.table(a, b, c).entry(gi, fi)
    }

    /// `g∘f` for `g ∈ Q(b,c)`, `f ∈ Q(a,b)` given in coordinates.
    pub fn compose(&self, a: usize, b: usize, c: usize, g: &[F], f: &[F]) -> Vec<F> {
        let t = self.table(a, b, c);
        assert_eq!((g.len(), f.len()), (t.g, t.f));
        let mut out = vec![F::zero(self.ctx); t.out];
        for (gi, gx) in g.iter().enumerate() {
            if gx.is_zero() {
                continue;
            }
            for (fi, fx) in f.iter().enumerate() {
                if fx.is_zero() {
                    continue;
                }
                let s = gx.clone() * fx.clone();
                for (o, e) in out.iter_mut().zip(t.entry(gi, fi)) {
                    if !e.is_zero() {
                        *o = o.clone() + s.clone() * e.clone();
                    }
                }
            }
        }
        out
    }

    /// Associativity, unit laws and the ideal property of the radical, on all basis elements.
    pub fn check_laws(&self) -> Result<(), PresentationError> {
        let n = self.len();
        let fail = |msg: String| Err(PresentationError::LawViolation(msg));
        for a in 0..n {
            for b in 0..n {
                for fi in 0..self.dim(a, b) {
                    let f = self.basis_vector(a, b, fi);
                    if self.compose(a, b, b, self.unit(b), &f) != f || self.compose(a, a, b, &f, self.unit(a)) != f {
                        return fail(format!("unit law fails on {}", self.labels(a, b)[fi]));
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        for hi in 0..self.dim(c, d) {
                            for gi in 0..self.dim(b, c) {
                                let hg = self.compose_basis(b, c, d, hi, gi).to_vec();
                                for fi in 0..self.dim(a, b) {
                                    let gf = self.compose_basis(a, b, c, gi, fi);
                                    let f = self.basis_vector(a, b, fi);
                                    let h = self.basis_vector(c, d, hi);
                                    if self.compose(a, b, d, &hg, &f) != self.compose(a, c, d, &h, gf) {
                                        return fail(format!(
                                            "associativity fails on ({}, {}, {})",
                                            self.labels(c, d)[hi],
                                            self.labels(b, c)[gi],
                                            self.labels(a, b)[fi]
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let rad = self.radical(a, b);
                for c in 0..n {
                    let target = ColumnBasis::new(self.radical(a, c).clone()).map_err(|e| PresentationError::LawViolation(e.to_string()))?;
                    for r in rad.columns() {
                        for gi in 0..self.dim(b, c) {
                            let g = self.basis_vector(b, c, gi);
                            if !target.contains(&self.compose(a, b, c, &g, &r)) {
                                return fail(format!("radical of ({a},{b}) is not a left ideal"));
                            }
                        }
                    }
                    let target = ColumnBasis::new(self.radical(c, b).clone()).map_err(|e| PresentationError::LawViolation(e.to_string()))?;
                    for r in rad.columns() {
                        for fi in 0..self.dim(c, a) {
                            let f = self.basis_vector(c, a, fi);
                            if !target.contains(&self.compose(c, a, b, &r, &f)) {
                                return fail(format!("radical of ({a},{b}) is not a right ideal"));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `Q(q, q) = k·1 ⊕ rad(q, q)`, so the stalk module at `q` exists.
    pub fn is_local_at(&self, q: usize) -> bool {
        let rad = self.radical(q, q);
        let u = Matrix::column_vector(self.ctx, self.unit(q).to_vec());
        let both = Matrix::hstack(self.ctx, self.dim(q, q), &[&u, rad]);
        both.rank() == self.dim(q, q) && rad.cols() + 1 == self.dim(q, q)
    }

    pub fn is_local(&self) -> bool {
        (0..self.len()).all(|q| self.is_local_at(q))
    }

    pub fn total_dim(&self) -> usize {
        self.labels.iter().map(|l| l.len()).sum()
    }
}

struct PathSpace {
    // paths[s*n+t] sorted by (length, arrows)
    paths: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

fn enumerate_paths(n: usize, arrows: &[(usize, usize)], max_len: usize) -> PathSpace {
    let mut paths = vec![Vec::new(); n * n];
    // frontier: (source, target, arrows)
    let mut frontier: Vec<(usize, usize, Vec<usize>)> = (0..n).map(|v| (v, v, Vec::new())).collect();
    for len in 0..=max_len {
        for (s, t, p) in &frontier {
            paths[s * n + t].push(p.clone());
        }
        if len == max_len {
            break;
        }
        let mut next = Vec::new();
        for (s, t, p) in &frontier {
            for (ai, &(src, tgt)) in arrows.iter().enumerate() {
                if src == *t {
                    let mut q = p.clone();
                    q.push(ai);
                    next.push((*s, tgt, q));
                }
            }
        }
        frontier = next;
    }
    for list in &mut paths {
        list.sort_by(|x, y| (x.len(), x).cmp(&(y.len(), y)));
    }
    let index = paths
        .iter()
        .map(|list| list.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect())
        .collect();
    PathSpace { paths, index }
}

pub fn present<F: Field>(ctx: F::Ctx, p: &QuiverPresentation) -> Result<FDCategory<F>, PresentationError> {
    p.validate_names()?;
    let n = p.vertices.len();
    let vidx: HashMap<&str, usize> = p.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let aidx: HashMap<&str, usize> = p.arrows.iter().enumerate().map(|(i, a)| (a.name.as_str(), i)).collect();
    let ends: Vec<(usize, usize)> = p.arrows.iter().map(|a| (vidx[a.source.as_str()], vidx[a.target.as_str()])).collect();
    let max_len = p.bound + 1;

    // Relations as (source, target, [(coefficient, arrows)]).
    let mut rels = Vec::new();
    for (ri, rel) in p.relations.iter().enumerate() {
        if rel.is_empty() {
            return Err(PresentationError::NotAdmissible {
                index: ri,
                detail: "empty relation".into(),
            });
        }
        let mut endpoints = None;
        let mut terms = Vec::new();
        for term in rel {
            if term.path.len() < 2 {
                return Err(PresentationError::NotAdmissible {
                    index: ri,
                    detail: format!("path {:?} has length {} < 2", term.path, term.path.len()),
                });
            }
            let arr: Vec<usize> = term.path.iter().map(|a| aidx[a.as_str()]).collect();
            for w in arr.windows(2) {
                if ends[w[0]].1 != ends[w[1]].0 {
                    return Err(PresentationError::BrokenPath {
                        path: term.path.clone(),
                        arrow: p.arrows[w[1]].name.clone(),
                    });
                }
            }
            let e = (ends[arr[0]].0, ends[*arr.last().unwrap()].1);
            if *endpoints.get_or_insert(e) != e {
                return Err(PresentationError::NotParallel { index: ri });
            }
            terms.push((term.coefficient.to_field::<F>(ctx)?, arr));
        }
        let (s, t) = endpoints.unwrap();
        rels.push((s, t, terms));
    }

    let space = enumerate_paths(n, &ends, max_len);

    // Spanning vectors of the truncated two-sided ideal.
    let mut ideal: Vec<Vec<Vec<F>>> = vec![Vec::new(); n * n];
    for (rs, rt, terms) in &rels {
        let min_len = terms.iter().map(|(_, a)| a.len()).min().unwrap();
        for s in 0..n {
            for u in &space.paths[s * n + rs] {
                for t in 0..n {
                    for w in &space.paths[rt * n + t] {
                        if u.len() + min_len + w.len() > max_len {
                            continue;
                        }
                        let dim = space.paths[s * n + t].len();
                        let mut v = vec![F::zero(ctx); dim];
                        for (c, arr) in terms {
                            if u.len() + arr.len() + w.len() > max_len {
                                continue;
                            }
                            let mut full = u.clone();
                            full.extend(arr);
                            full.extend(w);
                            let k = space.index[s * n + t][&full];
                            v[k] = v[k].clone() + c.clone();
                        }
                        ideal[s * n + t].push(v);
                    }
                }
            }
        }
    }

    let mut labels = vec![Vec::new(); n * n];
    let mut basis_paths: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n * n];
    let mut reducers = Vec::with_capacity(n * n);
    for s in 0..n {
        for t in 0..n {
            let st = s * n + t;
            let dim = space.paths[st].len();
            let w = Matrix::from_columns(ctx, dim, &ideal[st]).column_space();
            let id = Matrix::identity(ctx, dim);
            let aug = Matrix::hstack(ctx, dim, &[&w, &id]);
            let chosen: Vec<usize> = aug.rref().pivots.into_iter().filter(|&c| c >= w.cols()).map(|c| c - w.cols()).collect();
            if chosen.iter().any(|&k| space.paths[st][k].len() == max_len) {
                return Err(PresentationError::BoundTooSmall {
                    bound: p.bound,
                    from: p.vertices[s].clone(),
                    to: p.vertices[t].clone(),
                });
            }
            let sel = Matrix::from_fn(ctx, dim, chosen.len(), |r, c| if r == chosen[c] { F::one(ctx) } else { F::zero(ctx) });
            let full = Matrix::hstack(ctx, dim, &[&w, &sel]);
            let reducer = ColumnBasis::new(full).expect("ideal basis extended by independent paths");
            reducers.push((reducer, w.cols()));
            for &k in &chosen {
                let path = &space.paths[st][k];
                labels[st].push(if path.is_empty() {
                    format!("id_{}", p.vertices[s])
                } else {
                    path.iter().map(|&a| p.arrows[a].name.as_str()).collect::<Vec<_>>().join(".")
                });
                basis_paths[st].push(path.clone());
            }
        }
    }

    let reduce = |s: usize, t: usize, path: &[usize]| -> Vec<F> {
        let st = s * n + t;
        let dim_basis = basis_paths[st].len();
        if path.len() > max_len {
            return vec![F::zero(ctx); dim_basis];
        }
        let mut e = vec![F::zero(ctx); space.paths[st].len()];
        e[space.index[st][path]] = F::one(ctx);
        let (reducer, skip) = &reducers[st];
        reducer.coords(&e).expect("paths span the path space")[*skip..].to_vec()
    };

    let units = (0..n)
        .map(|q| {
            let pos = basis_paths[q * n + q].iter().position(|p| p.is_empty()).expect("identity survives admissible relations");
            let mut u = vec![F::zero(ctx); basis_paths[q * n + q].len()];
            u[pos] = F::one(ctx);
            u
        })
        .collect();
    let radical = (0..n * n)
        .map(|st| {
            let b = &basis_paths[st];
            let cols: Vec<usize> = (0..b.len()).filter(|&i| !b[i].is_empty()).collect();
            Matrix::from_fn(ctx, b.len(), cols.len(), |r, c| if r == cols[c] { F::one(ctx) } else { F::zero(ctx) })
        })
        .collect();

    let cat = FDCategory::from_fn(ctx, p.vertices.clone(), labels, units, radical, |a, b, c, gi, fi| {
        let f = &basis_paths[a * n + b][fi];
        let g = &basis_paths[b * n + c][gi];
        let mut path = f.clone();
        path.extend(g);
        reduce(a, c, &path)
    });
    Ok(cat)
}

/// The single-object category of the algebra `k^n` with orthogonal idempotents.
pub fn split_semisimple<F: Field>(ctx: F::Ctx, n: usize) -> FDCategory<F> {
    let labels = vec![(0..n).map(|i| format!("e{i}")).collect()];
    let units = vec![vec![F::one(ctx); n]];
    let radical = vec![Matrix::zeros(ctx, n, 0)];
    FDCategory::from_fn(ctx, vec!["*".into()], labels, units, radical, |_, _, _, gi, fi| {
        let mut v = vec![F::zero(ctx); n];
        if gi == fi {
            v[gi] = F::one(ctx);
        }
        v
    })
}

/// A one-object category from the multiplication table `e_i e_j = Σ table[i][j][k] e_k`.
///
/// The product `ab` is the composite `a∘b`.
pub fn from_algebra_table<F: Field>(
    ctx: F::Ctx,
    labels: Vec<String>,
    table: Vec<Vec<Vec<F>>>,
    unit: Vec<F>,
    radical: Matrix<F>,
) -> Result<FDCategory<F>, PresentationError> {
    let cat = FDCategory::from_fn(ctx, vec!["*".into()], vec![labels], vec![unit], vec![radical], |_, _, _, gi, fi| {
        table[gi][fi].clone()
    });
    cat.check_laws()?;
    Ok(cat)
}

/// `A ⊗ Q` for a single-object `A`, with basis `a ⊗ x` indexed `a * dim Q(s,t) + x`.
pub fn tensor_with_algebra<F: Field>(a: &FDCategory<F>, q: &FDCategory<F>) -> Result<FDCategory<F>, PresentationError> {
    if a.len() != 1 {
        return Err(PresentationError::NotSingleObject);
    }
    let ctx = q.ctx();
    let n = q.len();
    let da = a.dim(0, 0);
    let mut labels = Vec::with_capacity(n * n);
    let mut radical = Vec::with_capacity(n * n);
    for s in 0..n {
        for t in 0..n {
            let mut l = Vec::new();
            for al in a.labels(0, 0) {
                for ql in q.labels(s, t) {
                    l.push(format!("{al}⊗{ql}"));
                }
            }
            labels.push(l);
            let dq = q.dim(s, t);
            let ra = a.radical(0, 0).kron(&Matrix::identity(ctx, dq));
            let rq = Matrix::identity(ctx, da).kron(q.radical(s, t));
            radical.push(Matrix::hstack(ctx, da * dq, &[&ra, &rq]).column_space());
        }
    }
    let units = (0..n)
        .map(|v| {
            let ua = Matrix::column_vector(ctx, a.unit(0).to_vec());
            let uq = Matrix::column_vector(ctx, q.unit(v).to_vec());
            ua.kron(&uq).column(0)
        })
        .collect();
    Ok(FDCategory::from_fn(ctx, q.objects().to_vec(), labels, units, radical, |x, y, z, gi, fi| {
        let (dg, df) = (q.dim(y, z), q.dim(x, y));
        let (ga, gq) = (gi / dg, gi % dg);
        let (fa, fq) = (fi / df, fi % df);
        let pa = Matrix::column_vector(ctx, a.compose_basis(0, 0, 0, ga, fa).to_vec());
        let pq = Matrix::column_vector(ctx, q.compose_basis(x, y, z, gq, fq).to_vec());
        pa.kron(&pq).column(0)
    }))
}

/// The opposite category: `C^op(s, t) = C(t, s)` and `g ∘^op f = f ∘ g`.
pub fn opposite<F: Field>(c: &FDCategory<F>) -> FDCategory<F> {
    let n = c.len();
    let labels = (0..n * n).map(|st| c.labels(st % n, st / n).to_vec()).collect();
    let radical = (0..n * n).map(|st| c.radical(st % n, st / n).clone()).collect();
    let units = (0..n).map(|q| c.unit(q).to_vec()).collect();
    FDCategory::from_fn(c.ctx(), c.objects().to_vec(), labels, units, radical, |a, b, cc, gi, fi| {
        // g ∈ C(c, b), f ∈ C(b, a); the result is f∘g ∈ C(c, a).
        c.compose_basis(cc, b, a, fi, gi).to_vec()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Prime, Rational};

    fn p() -> Prime {
        Prime::DEFAULT
    }

    fn dims<F: Field>(c: &FDCategory<F>) -> Vec<usize> {
        let n = c.len();
        (0..n * n).map(|st| c.dim(st / n, st % n)).collect()
    }

    #[test]
    fn two_cyclic_dims() {
        let mut pres = QuiverPresentation::cyclic(2, 2);
        pres.bound = 2;
        let c = present::<Fp>(p(), &pres).unwrap();
        assert_eq!(dims(&c), vec![1, 1, 1, 1]);
        c.check_laws().unwrap();
        assert!(c.is_local());
        assert_eq!(c.labels(0, 1), ["a"]);
    }

    #[test]
    fn cube_relation() {
        let c = present::<Fp>(p(), &QuiverPresentation::truncated_polynomial(3)).unwrap();
        assert_eq!(c.dim(0, 0), 3);
        assert_eq!(c.radical(0, 0).cols(), 2);
        c.check_laws().unwrap();
    }

    #[test]
    fn dual_numbers() {
        let c = present::<Fp>(p(), &QuiverPresentation::truncated_polynomial(2)).unwrap();
        assert_eq!(c.dim(0, 0), 2);
        assert_eq!(c.labels(0, 0), ["id_*", "d"]);
    }

    #[test]
    fn bound_too_small() {
        let mut pres = QuiverPresentation::truncated_polynomial(3);
        pres.bound = 1;
        assert!(matches!(present::<Fp>(p(), &pres), Err(PresentationError::BoundTooSmall { .. })));
        let mut free = QuiverPresentation::truncated_polynomial(3);
        free.relations.clear();
        assert!(matches!(present::<Fp>(p(), &free), Err(PresentationError::BoundTooSmall { .. })));
    }

    #[test]
    fn inadmissible_relation() {
        let mut pres = QuiverPresentation::truncated_polynomial(2);
        pres.relations = vec![vec![Term {
            coefficient: 1.into(),
            path: vec!["d".into()],
        }]];
        assert!(matches!(present::<Fp>(p(), &pres), Err(PresentationError::NotAdmissible { .. })));
    }

    #[test]
    fn unknown_arrow_is_named() {
        let mut pres = QuiverPresentation::cyclic(2, 2);
        pres.relations[0][0].path[1] = "zz".into();
        assert_eq!(present::<Fp>(p(), &pres).unwrap_err(), PresentationError::UnknownArrow("zz".into()));
    }

    #[test]
    fn commutativity_relation() {
        // Square 0 -> 1 -> 3, 0 -> 2 -> 3 with xy = zw.
        let arrow = |n: &str, s: &str, t: &str| Arrow {
            name: n.into(),
            source: s.into(),
            target: t.into(),
        };
        let pres = QuiverPresentation {
            vertices: vec!["0".into(), "1".into(), "2".into(), "3".into()],
            arrows: vec![arrow("x", "0", "1"), arrow("y", "1", "3"), arrow("z", "0", "2"), arrow("w", "2", "3")],
            relations: vec![vec![
                Term {
                    coefficient: 1.into(),
                    path: vec!["x".into(), "y".into()],
                },
                Term {
                    coefficient: Coefficient::Text("-1".into()),
                    path: vec!["z".into(), "w".into()],
                },
            ]],
            bound: 2,
        };
        let c = present::<Rational>((), &pres).unwrap();
        assert_eq!(c.dim(0, 3), 1);
        c.check_laws().unwrap();
    }

    #[test]
    fn tensor_with_unit_algebra() {
        let q = present::<Fp>(p(), &QuiverPresentation::cyclic(2, 2)).unwrap();
        let k = split_semisimple::<Fp>(p(), 1);
        let t = tensor_with_algebra(&k, &q).unwrap();
        assert_eq!(dims(&t), dims(&q));
        t.check_laws().unwrap();
    }

    #[test]
    fn tensor_with_dual_numbers() {
        let q = present::<Fp>(p(), &QuiverPresentation::cyclic(2, 2)).unwrap();
        let a = present::<Fp>(p(), &QuiverPresentation::truncated_polynomial(2)).unwrap();
        let t = tensor_with_algebra(&a, &q).unwrap();
        assert_eq!(dims(&t), vec![2, 2, 2, 2]);
        t.check_laws().unwrap();
        assert!(t.is_local());
    }

    #[test]
    fn tensor_dual_with_cube_is_associative() {
        let q = present::<Fp>(p(), &QuiverPresentation::truncated_polynomial(3)).unwrap();
        let a = present::<Fp>(p(), &QuiverPresentation::truncated_polynomial(2)).unwrap();
        let t = tensor_with_algebra(&a, &q).unwrap();
        assert_eq!(t.dim(0, 0), 6);
        t.check_laws().unwrap();
    }

    #[test]
    fn semisimple_algebra() {
        let a = split_semisimple::<Fp>(p(), 2);
        a.check_laws().unwrap();
        assert!(!a.is_local());
    }

    #[test]
    fn opposite_properties() {
        let c = present::<Fp>(p(), &QuiverPresentation::truncated_polynomial(3)).unwrap();
        assert_eq!(opposite(&c), c);
        let q = present::<Fp>(p(), &QuiverPresentation::cyclic(2, 2)).unwrap();
        let qo = opposite(&q);
        assert_eq!(qo.labels(1, 0), ["a"]);
        assert_eq!(dims(&qo), dims(&q));
        qo.check_laws().unwrap();
        assert_eq!(opposite(&qo), q);
        let a2 = present::<Fp>(p(), &QuiverPresentation::linear_a2()).unwrap();
        opposite(&a2).check_laws().unwrap();
    }

    #[test]
    fn algebra_table_roundtrip() {
        // Dual numbers from a table.
        let z = Fp::new(p(), 0);
        let o = Fp::new(p(), 1);
        let table = vec![vec![vec![o, z], vec![z, o]], vec![vec![z, o], vec![z, z]]];
        let rad = Matrix::from_i64(p(), &[vec![0], vec![1]]);
        let a = from_algebra_table(p(), vec!["1".into(), "x".into()], table, vec![o, z], rad).unwrap();
        let b = present::<Fp>(p(), &QuiverPresentation::truncated_polynomial(2)).unwrap();
        assert_eq!(a.dim(0, 0), b.dim(0, 0));
        assert!(a.is_local());
    }

    #[test]
    fn json_shape() {
        let text = r#"{"vertices":["0","1"],"arrows":[{"name":"a","source":"0","target":"1"},{"name":"b","source":"1","target":"0"}],
            "relations":[[{"coefficient":1,"path":["a","b"]}],[{"coefficient":"1/2","path":["b","a"]}]],"bound":2}"#;
        let pres: QuiverPresentation = serde_json::from_str(text).unwrap();
        assert_eq!(pres.relations.len(), 2);
        let c = present::<Fp>(p(), &pres).unwrap();
        assert_eq!(c.total_dim(), 4);
    }
}
