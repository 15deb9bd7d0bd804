//! Windowed complete projective resolutions over a self-injective category.

use std::sync::Arc;

use crate::complexes::Window;
use crate::error::{ModuleError, ResolutionError};
use crate::field::Field;
use crate::linalg::{ColumnBasis, Matrix};
use crate::modules::{
    cokernel, injective_envelope, kernel, projective_cover, radical_spans, require_self_injective, tensor_algebra_map,
    tensor_algebra_module, Rep, RepMap,
};
use crate::presentations::FDCategory;

/// A bounded complex of modules: components on a window, zero outside.
#[derive(Clone, Debug)]
pub struct ModuleComplex<F: Field> {
    cat: Arc<FDCategory<F>>,
    window: Window,
    comps: Vec<Arc<Rep<F>>>,
    // d^j for j in [lo, hi - 1]
    diffs: Vec<RepMap<F>>,
}

impl<F: Field> ModuleComplex<F> {
    pub fn new(cat: Arc<FDCategory<F>>, window: Window, comps: Vec<Arc<Rep<F>>>, diffs: Vec<RepMap<F>>) -> Result<Self, ModuleError> {
        if comps.len() != window.len() || diffs.len() + 1 != comps.len() {
            return Err(ModuleError::Invalid("complex data does not match its window".into()));
        }
        Ok(ModuleComplex { cat, window, comps, diffs })
    }

    /// `M` placed in a single degree.
    pub fn concentrated(m: Arc<Rep<F>>, degree: i64) -> Self {
        ModuleComplex {
            cat: m.cat().clone(),
            window: Window { lo: degree, hi: degree },
            comps: vec![m],
            diffs: Vec::new(),
        }
    }

    pub fn cat(&self) -> &Arc<FDCategory<F>> {
        &self.cat
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn component(&self, j: i64) -> Option<&Arc<Rep<F>>> {
        self.window.contains(j).then(|| &self.comps[(j - self.window.lo) as usize])
    }

    /// `d^j: X^j -> X^{j+1}`, if both ends lie in the window.
    pub fn d(&self, j: i64) -> Option<&RepMap<F>> {
        (self.window.contains(j) && self.window.contains(j + 1)).then(|| &self.diffs[(j - self.window.lo) as usize])
    }

    /// Brutal truncation to `w ∩ window`.
    pub fn truncate(&self, w: Window) -> Option<Self> {
        let w = self.window.intersect(&w)?;
        let a = (w.lo - self.window.lo) as usize;
        let b = (w.hi - self.window.lo) as usize;
        Some(ModuleComplex {
            cat: self.cat.clone(),
            window: w,
            comps: self.comps[a..=b].to_vec(),
            diffs: self.diffs[a..b].to_vec(),
        })
    }

    pub fn squares_to_zero(&self) -> bool {
        self.diffs.windows(2).all(|p| p[1].compose_unchecked(&p[0]).is_zero())
    }
}

#[derive(Clone, Debug)]
pub struct CompleteResolution<F: Field> {
    base: Arc<Rep<F>>,
    window: Window,
    comps: Vec<Arc<Rep<F>>>,
    labels: Vec<Vec<usize>>,
    // for j in [lo, hi - 1]: P^j ↠ B_j and B_j ↪ P^{j+1}, with B_0 = X
    epis: Vec<RepMap<F>>,
    monos: Vec<RepMap<F>>,
    diffs: Vec<RepMap<F>>,
    degenerate: bool,
}

/// Splices iterated projective covers (degrees ≤ 0) with iterated injective
/// envelopes (degrees ≥ 1).
pub fn complete_resolution<F: Field>(x: &Arc<Rep<F>>, window: Window) -> Result<CompleteResolution<F>, ResolutionError> {
    if window.lo > -1 || window.hi < 1 {
        return Err(ResolutionError::WindowTooSmall {
            lo: window.lo,
            hi: window.hi,
        });
    }
    require_self_injective(x.cat())?;
    let n = window.len();
    let at = |j: i64| (j - window.lo) as usize;
    let mut comps: Vec<Option<Arc<Rep<F>>>> = vec![None; n];
    let mut labels = vec![Vec::new(); n];
    let mut epis: Vec<Option<RepMap<F>>> = vec![None; n - 1];
    let mut monos: Vec<Option<RepMap<F>>> = vec![None; n - 1];

    let mut b = x.clone();
    for j in (window.lo..=0).rev() {
        let cover = projective_cover(&b);
        comps[at(j)] = Some(cover.projective.clone());
        labels[at(j)] = cover.summands.clone();
        if j > window.lo {
            let (k, incl) = kernel(&cover.epi);
            monos[at(j - 1)] = Some(incl);
            b = k;
        }
        epis[at(j)] = Some(cover.epi);
    }
    let degenerate = monos[at(-1)].as_ref().is_some_and(|m| m.source.is_zero());

    let mut b = x.clone();
    for j in 1..=window.hi {
        let env = injective_envelope(&b)?;
        comps[at(j)] = Some(env.injective.clone());
        labels[at(j)] = env.summands.clone();
        if j < window.hi {
            let (c, proj) = cokernel(&env.mono);
            epis[at(j)] = Some(proj);
            b = c;
        }
        monos[at(j - 1)] = Some(env.mono);
    }

    let comps: Vec<Arc<Rep<F>>> = comps.into_iter().map(|c| c.expect("filled")).collect();
    let epis: Vec<RepMap<F>> = epis.into_iter().map(|e| e.expect("filled")).collect();
    let monos: Vec<RepMap<F>> = monos.into_iter().map(|m| m.expect("filled")).collect();
    let diffs = epis.iter().zip(&monos).map(|(e, m)| m.compose_unchecked(e)).collect();
    Ok(CompleteResolution {
        base: x.clone(),
        window,
        comps,
        labels,
        epis,
        monos,
        diffs,
        degenerate,
    })
}

impl<F: Field> CompleteResolution<F> {
    pub fn base(&self) -> &Arc<Rep<F>> {
        &self.base
    }

    pub fn cat(&self) -> &Arc<FDCategory<F>> {
        self.base.cat()
    }

    pub fn window(&self) -> Window {
        self.window
    }

    fn at(&self, j: i64) -> usize {
        (j - self.window.lo) as usize
    }

    pub fn component(&self, j: i64) -> Option<&Arc<Rep<F>>> {
        self.window.contains(j).then(|| &self.comps[self.at(j)])
    }

    /// Objects of the representable summands of `P^j`, in order.
    pub fn labels(&self, j: i64) -> Option<&[usize]> {
        self.window.contains(j).then(|| self.labels[self.at(j)].as_slice())
    }

    pub fn d(&self, j: i64) -> Option<&RepMap<F>> {
        (self.window.contains(j) && self.window.contains(j + 1)).then(|| &self.diffs[self.at(j)])
    }

    /// `P^j ↠ B_j`.
    pub fn epi(&self, j: i64) -> Option<&RepMap<F>> {
        self.d(j).map(|_| &self.epis[self.at(j)])
    }

    /// `B_j ↪ P^{j+1}`.
    pub fn mono(&self, j: i64) -> Option<&RepMap<F>> {
        self.d(j).map(|_| &self.monos[self.at(j)])
    }

    /// The augmentation `P^0 ↠ X`.
    pub fn p0(&self) -> &RepMap<F> {
        &self.epis[self.at(0)]
    }

    /// True when `X` is projective, so the resolution collapses to `X -> X`.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// `Ω^i X`, the image of `d^{-i}`, with its inclusion into `P^{-i+1}`.
    pub fn omega(&self, i: i64) -> Result<(&Arc<Rep<F>>, &RepMap<F>), ResolutionError> {
        let m = self.mono(-i).ok_or(ResolutionError::EdgeDegree { degree: -i })?;
        Ok((&m.source, m))
    }

    pub fn complex(&self) -> ModuleComplex<F> {
        ModuleComplex {
            cat: self.cat().clone(),
            window: self.window,
            comps: self.comps.clone(),
            diffs: self.diffs.clone(),
        }
    }

    pub fn squares_to_zero(&self) -> bool {
        self.complex().squares_to_zero()
    }

    /// `ker d^j = im d^{j-1}` objectwise, for interior `j`.
    pub fn is_exact_at(&self, j: i64) -> bool {
        let (Some(prev), Some(next)) = (self.d(j - 1), self.d(j)) else {
            return false;
        };
        let p = &self.comps[self.at(j)];
        (0..p.cat().len()).all(|q| prev.comps[q].rank() + next.comps[q].rank() == p.dim(q))
            && next.compose_unchecked(prev).is_zero()
    }

    /// `im d^j ⊆ rad P^{j+1}`.
    pub fn is_minimal_at(&self, j: i64) -> bool {
        let Some(d) = self.d(j) else {
            return false;
        };
        let target = &self.comps[self.at(j + 1)];
        let rad = radical_spans(target);
        (0..target.cat().len()).all(|q| {
            let r = &rad[q];
            let basis = ColumnBasis::new(r.clone()).expect("independent");
            d.comps[q].columns().iter().all(|c| basis.contains(c))
        })
    }

    pub fn interior(&self) -> impl Iterator<Item = i64> {
        self.window.lo + 1..self.window.hi
    }

    pub fn is_exact(&self) -> bool {
        self.interior().all(|j| self.is_exact_at(j))
    }

    pub fn is_minimal(&self) -> bool {
        (self.window.lo..self.window.hi).all(|j| self.is_minimal_at(j))
    }

    /// Every component equals the direct sum of representables its labels name.
    pub fn labels_match(&self) -> bool {
        self.window
            .degrees()
            .all(|j| *self.comps[self.at(j)] == *crate::modules::sum_of_representables(self.cat(), &self.labels[self.at(j)]))
    }
}

/// `A ⊗ R` over `A ⊗ Q`, componentwise, with the same summand labels.
pub fn tensor_resolution<F: Field>(
    a: &FDCategory<F>,
    aq: &Arc<FDCategory<F>>,
    r: &CompleteResolution<F>,
) -> Result<CompleteResolution<F>, ResolutionError> {
    let t = |m: &Arc<Rep<F>>| tensor_algebra_module(a, aq, m).map(Arc::new);
    let base = t(&r.base)?;
    let comps = r.comps.iter().map(t).collect::<Result<Vec<_>, _>>()?;
    let mut epis = Vec::new();
    let mut monos = Vec::new();
    for (j, (e, m)) in r.epis.iter().zip(&r.monos).enumerate() {
        let b = if j as i64 + r.window.lo == 0 { base.clone() } else { t(&e.target)? };
        epis.push(tensor_algebra_map(a, e, comps[j].clone(), b.clone()));
        monos.push(tensor_algebra_map(a, m, b, comps[j + 1].clone()));
    }
    let diffs = epis.iter().zip(&monos).map(|(e, m)| m.compose_unchecked(e)).collect();
    Ok(CompleteResolution {
        base,
        window: r.window,
        comps,
        labels: r.labels.clone(),
        epis,
        monos,
        diffs,
        degenerate: r.degenerate,
    })
}

/// Objectwise dimension table of the components, for display.
pub fn dimension_table<F: Field>(r: &CompleteResolution<F>) -> Vec<(i64, Vec<usize>)> {
    r.window.degrees().map(|j| (j, r.component(j).expect("in window").dims().to_vec())).collect()
}

/// The differential `d^j` at object `q` as a plain matrix.
pub fn differential_at<F: Field>(r: &CompleteResolution<F>, j: i64, q: usize) -> Option<Matrix<F>> {
    r.d(j).map(|d| d.comps[q].clone())
}
