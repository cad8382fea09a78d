//! First cohomology with coefficients in a graded piece of `k[V]` or in a
//! one-dimensional character, Frobenius powers of cocycles, annihilators and
//! trivial-coefficient `H^n` from the normalized bar complex.
//!
//! Cocycles satisfy `g_{στ} = σ·g_τ + g_σ` for the left action
//! `σ·f = f ∘ σ^{-1}` on polynomials.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::gf::{FieldCtx, FieldElem};
use crate::group::{FiniteMatrixGroup, Group, GroupError, Subgroup};
use crate::linalg::{collect_sparse, Echelon, SparseVec};
use crate::mpoly::{same_ring, Monomial, MonomialOrder, PolyError, PolyRing, Polynomial, Ring};

/// Largest module accepted at all (coboundary tests on Frobenius powers).
pub const MODULE_CAP: u64 = 100_000;
/// Largest module for which the full cocycle space is solved.
pub const COCYCLE_SPACE_CAP: u64 = 10_000;
/// Bound on `(|G|-1)^n` for the bar complex.
pub const BAR_CAP: u64 = 100_000;
/// Largest group whose subgroups are enumerated in the class search.
pub const SUBGROUP_SEARCH_CAP: usize = 64;
pub const DEFAULT_FROBENIUS_M_MAX: u32 = 8;
pub const DEFAULT_SEARCH_DEGREE: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("{what} has size {size}, above the cap {cap}")]
    SizeCap { what: &'static str, size: u64, cap: u64 },
    #[error("not a cocycle: {0}")]
    InvalidCocycle(String),
    #[error("character does not extend to a homomorphism: {0}")]
    BadCharacter(String),
    #[error("ring has {found} variables but the group acts on dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ring field differs from the group field")]
    FieldMismatch,
    #[error("operands live in different modules or groups")]
    ModuleMismatch,
    #[error("{0} is not invariant")]
    NotInvariant(String),
    #[error("{0} is not homogeneous")]
    NotHomogeneous(String),
    #[error("the operation needs graded polynomial coefficients")]
    NotGraded,
    #[error("the subgroup does not belong to the cocycle's group")]
    NotSubgroup,
    #[error("the class is already zero")]
    TrivialClass,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

type Result<T> = std::result::Result<T, CohomologyError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuleKind {
    /// Homogeneous polynomials of one degree.
    Graded { degree: u32 },
    /// `k` with `σ` acting by `χ(σ)`; one value per group element.
    Character { values: Vec<u32> },
}

/// A coefficient module with a fixed monomial basis. Character modules use a
/// ring without variables, so their elements are constants.
pub struct CoefficientModule {
    group: Group,
    kind: ModuleKind,
    ring: Ring,
    basis: Vec<Monomial>,
    position: HashMap<Monomial, u32>,
}

impl fmt::Debug for CoefficientModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoefficientModule({}, dim {})", self.describe(), self.dim())
    }
}

impl CoefficientModule {
    /// Degree-`d` piece of `ring`, which must carry the group's variables.
    pub fn graded(group: &Group, ring: &Ring, degree: u32) -> Result<Arc<Self>> {
        if ring.nvars() != group.dim() {
            return Err(CohomologyError::DimensionMismatch { expected: group.dim(), found: ring.nvars() });
        }
        if **ring.field() != **group.field() {
            return Err(CohomologyError::FieldMismatch);
        }
        let size = ring.count_monomials_of_degree(degree);
        if size > MODULE_CAP {
            return Err(CohomologyError::SizeCap { what: "graded piece", size, cap: MODULE_CAP });
        }
        Ok(Arc::new(Self::build(group, ModuleKind::Graded { degree }, ring.clone(), ring.monomials_of_degree(degree))))
    }

    /// The character with the given values on the generators; it must
    /// extend to a homomorphism `G → k^×`.
    pub fn character(group: &Group, generator_values: &[FieldElem]) -> Result<Arc<Self>> {
        let field = group.field();
        if generator_values.len() != group.generators().len() {
            return Err(CohomologyError::BadCharacter(format!(
                "{} values for {} generators",
                generator_values.len(),
                group.generators().len()
            )));
        }
        let mut codes = Vec::with_capacity(generator_values.len());
        for v in generator_values {
            if **v.field() != **field {
                return Err(CohomologyError::FieldMismatch);
            }
            if v.is_zero() {
                return Err(CohomologyError::BadCharacter("zero value".into()));
            }
            codes.push(v.code());
        }
        let mut values = vec![0u32; group.order()];
        values[group.identity()] = 1;
        for e in group.spanning_tree() {
            values[e.element] = field.mul(codes[e.gen], values[e.parent]);
        }
        for (i, &s) in group.generators().iter().enumerate() {
            if values[s] != codes[i] {
                return Err(CohomologyError::BadCharacter(format!("generator {} is forced to {}", i + 1, field.format(values[s]))));
            }
        }
        Self::from_character_values(group, values)
    }

    fn from_character_values(group: &Group, values: Vec<u32>) -> Result<Arc<Self>> {
        let field = group.field();
        let n = group.order();
        for a in 0..n {
            for b in 0..n {
                if values[group.mul(a, b)] != field.mul(values[a], values[b]) {
                    return Err(CohomologyError::BadCharacter("not multiplicative".into()));
                }
            }
        }
        let ring = PolyRing::internal(field, Vec::new(), MonomialOrder::Grevlex, Vec::new())?;
        Ok(Arc::new(Self::build(group, ModuleKind::Character { values }, ring, vec![Monomial::ONE])))
    }

    fn build(group: &Group, kind: ModuleKind, ring: Ring, basis: Vec<Monomial>) -> Self {
        let position = basis.iter().enumerate().map(|(i, m)| (*m, i as u32)).collect();
        CoefficientModule { group: group.clone(), kind, ring, basis, position }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn kind(&self) -> &ModuleKind {
        &self.kind
    }

    /// The ring holding module elements.
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self) -> Option<u32> {
        match self.kind {
            ModuleKind::Graded { degree } => Some(degree),
            ModuleKind::Character { .. } => None,
        }
    }

    /// True iff every element acts as the identity.
    pub fn is_trivial(&self) -> bool {
        match &self.kind {
            ModuleKind::Graded { degree } => *degree == 0,
            ModuleKind::Character { values } => values.iter().all(|&v| v == 1),
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            ModuleKind::Graded { degree } => format!("degree {degree} of {}", self.ring.describe()),
            ModuleKind::Character { values } => {
                let f = self.group.field();
                let gens: Vec<String> = self.group.generators().iter().map(|&s| f.format(values[s])).collect();
                format!("character [{}] over {}", gens.join(", "), f.describe())
            }
        }
    }

    pub fn contains(&self, v: &Polynomial) -> bool {
        same_ring(v.ring(), &self.ring) && v.terms().iter().all(|(m, _)| self.position.contains_key(m))
    }

    /// `σ·v`.
    pub fn act(&self, sigma: usize, v: &Polynomial) -> Result<Polynomial> {
        Ok(match &self.kind {
            ModuleKind::Graded { .. } => self.group.act(sigma, v)?,
            ModuleKind::Character { values } => v.scale(values[sigma]),
        })
    }

    fn coords(&self, v: &Polynomial) -> SparseVec {
        let mut out: SparseVec = v.terms().iter().map(|(m, c)| (self.position[m], *c)).collect();
        out.sort_unstable();
        out
    }

    fn element(&self, coords: impl IntoIterator<Item = (u32, u32)>) -> Polynomial {
        Polynomial::from_terms(&self.ring, coords.into_iter().map(|(i, c)| (self.basis[i as usize], c)))
    }

    fn basis_element(&self, j: usize) -> Polynomial {
        Polynomial::monomial(&self.ring, self.basis[j], 1)
    }

    /// Coordinates of `(σ - 1)·e_j` for every basis element `e_j`.
    fn difference_columns(&self, sigma: usize) -> Result<Vec<SparseVec>> {
        (0..self.dim())
            .map(|j| {
                let e = self.basis_element(j);
                Ok(self.coords(&self.act(sigma, &e)?.sub(&e)))
            })
            .collect()
    }

    /// The module receiving `m`-fold Frobenius powers of elements.
    fn frobenius_target(&self, m: u32) -> Result<Arc<Self>> {
        let p = self.group.field().characteristic() as u64;
        match &self.kind {
            ModuleKind::Graded { degree } => {
                let d = p.checked_pow(m).and_then(|q| q.checked_mul(*degree as u64)).filter(|&d| d <= u32::MAX as u64);
                let d = d.ok_or(CohomologyError::SizeCap { what: "Frobenius degree", size: u64::MAX, cap: u32::MAX as u64 })?;
                Self::graded(&self.group, &self.ring, d as u32)
            }
            ModuleKind::Character { values } => {
                let f = self.group.field();
                Self::from_character_values(&self.group, values.iter().map(|&v| f.frobenius(v, m)).collect())
            }
        }
    }

    /// Same kind of module over a subgroup, given the parent index of each
    /// subgroup element.
    fn restricted(&self, sub: &Group, parent_index: &[usize]) -> Result<Arc<Self>> {
        match &self.kind {
            ModuleKind::Graded { degree } => Self::graded(sub, &self.ring, *degree),
            ModuleKind::Character { values } => {
                Self::from_character_values(sub, parent_index.iter().map(|&x| values[x]).collect())
            }
        }
    }
}

fn same_module(a: &CoefficientModule, b: &CoefficientModule) -> bool {
    Arc::ptr_eq(&a.group, &b.group) && a.kind == b.kind && same_ring(&a.ring, &b.ring)
}

/// A 1-cocycle, stored on every group element and verified on all pairs.
#[derive(Clone)]
pub struct Cocycle1 {
    module: Arc<CoefficientModule>,
    values: Vec<Polynomial>,
}

impl fmt::Debug for Cocycle1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.table()).finish()
    }
}

impl PartialEq for Cocycle1 {
    fn eq(&self, other: &Self) -> bool {
        same_module(&self.module, &other.module) && self.values == other.values
    }
}

impl Cocycle1 {
    /// Values indexed like the group's elements.
    pub fn new(module: &Arc<CoefficientModule>, values: Vec<Polynomial>) -> Result<Self> {
        let g = &module.group;
        if values.len() != g.order() {
            return Err(CohomologyError::InvalidCocycle(format!("{} values for a group of order {}", values.len(), g.order())));
        }
        if let Some(v) = values.iter().find(|v| !module.contains(v)) {
            return Err(CohomologyError::InvalidCocycle(format!("value {v} is outside {}", module.describe())));
        }
        let words = || g.words();
        if !values[g.identity()].is_zero() {
            return Err(CohomologyError::InvalidCocycle("nonzero value at the identity".into()));
        }
        for s in 0..g.order() {
            for t in 0..g.order() {
                let rhs = module.act(s, &values[t])?.add(&values[s]);
                if values[g.mul(s, t)] != rhs {
                    let w = words();
                    return Err(CohomologyError::InvalidCocycle(format!("identity fails at ({}, {})", w[s], w[t])));
                }
            }
        }
        Ok(Cocycle1 { module: module.clone(), values })
    }

    /// Extends generator values along the spanning tree, then verifies.
    pub fn from_generators(module: &Arc<CoefficientModule>, generator_values: &[Polynomial]) -> Result<Self> {
        let g = &module.group;
        if generator_values.len() != g.generators().len() {
            return Err(CohomologyError::InvalidCocycle(format!(
                "{} values for {} generators",
                generator_values.len(),
                g.generators().len()
            )));
        }
        if let Some(v) = generator_values.iter().find(|v| !module.contains(v)) {
            return Err(CohomologyError::InvalidCocycle(format!("value {v} is outside {}", module.describe())));
        }
        let mut values = vec![Polynomial::zero(&module.ring); g.order()];
        for e in g.spanning_tree() {
            let s = g.generators()[e.gen];
            values[e.element] = module.act(s, &values[e.parent])?.add(&generator_values[e.gen]);
        }
        for (i, &s) in g.generators().iter().enumerate() {
            if values[s] != generator_values[i] {
                return Err(CohomologyError::InvalidCocycle(format!("generator {} is forced to {}", i + 1, values[s])));
            }
        }
        Self::new(module, values)
    }

    pub fn zero(module: &Arc<CoefficientModule>) -> Self {
        Cocycle1 { module: module.clone(), values: vec![Polynomial::zero(&module.ring); module.group.order()] }
    }

    /// The coboundary `σ ↦ (σ - 1)·b`.
    pub fn coboundary(module: &Arc<CoefficientModule>, b: &Polynomial) -> Result<Self> {
        if !module.contains(b) {
            return Err(CohomologyError::ModuleMismatch);
        }
        let values =
            (0..module.group.order()).map(|s| Ok(module.act(s, b)?.sub(b))).collect::<Result<Vec<_>>>()?;
        Ok(Cocycle1 { module: module.clone(), values })
    }

    pub fn module(&self) -> &Arc<CoefficientModule> {
        &self.module
    }

    pub fn group(&self) -> &Group {
        &self.module.group
    }

    pub fn values(&self) -> &[Polynomial] {
        &self.values
    }

    pub fn value(&self, sigma: usize) -> &Polynomial {
        &self.values[sigma]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Polynomial::is_zero)
    }

    pub fn add(&self, other: &Cocycle1) -> Result<Cocycle1> {
        if !same_module(&self.module, &other.module) {
            return Err(CohomologyError::ModuleMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.add(b)).collect();
        Ok(Cocycle1 { module: self.module.clone(), values })
    }

    /// Element word and value for every element, in element order.
    pub fn table(&self) -> Vec<(String, String)> {
        self.group().words().into_iter().zip(&self.values).map(|(w, v)| (w, v.to_string())).collect()
    }

    /// Values on the non-identity elements, concatenated in module coordinates.
    fn vector(&self) -> SparseVec {
        let g = self.group();
        let dim = self.module.dim() as u32;
        let mut out = Vec::new();
        for (slot, x) in non_identity(g).into_iter().enumerate() {
            out.extend(self.module.coords(&self.values[x]).into_iter().map(|(i, c)| (slot as u32 * dim + i, c)));
        }
        out
    }

    fn from_vector(module: &Arc<CoefficientModule>, v: &[(u32, u32)]) -> Self {
        let g = &module.group;
        let dim = module.dim() as u32;
        let mut values = vec![Polynomial::zero(&module.ring); g.order()];
        for (slot, x) in non_identity(g).into_iter().enumerate() {
            let lo = v.partition_point(|e| e.0 < slot as u32 * dim);
            let hi = v.partition_point(|e| e.0 < (slot as u32 + 1) * dim);
            values[x] = module.element(v[lo..hi].iter().map(|&(i, c)| (i - slot as u32 * dim, c)));
        }
        Cocycle1 { module: module.clone(), values }
    }
}

fn non_identity(g: &FiniteMatrixGroup) -> Vec<usize> {
    (0..g.order()).filter(|&x| x != g.identity()).collect()
}

/// `Z^1`, `B^1` and a set of cocycles whose classes form a basis of `H^1`.
#[derive(Debug, Clone)]
pub struct CohomologySpace {
    pub module: Arc<CoefficientModule>,
    pub dim_z: usize,
    pub dim_b: usize,
    pub classes: Vec<Cocycle1>,
    pub cocycles: Vec<Cocycle1>,
}

impl CohomologySpace {
    pub fn dim_h(&self) -> usize {
        self.classes.len()
    }
}

/// Solves `u_{sτ} = s·u_τ + u_s` for the generators `s` and all `τ`, with
/// one unknown block per non-identity element; these identities imply the
/// rest by induction on word length.
pub fn cocycle_space(module: &Arc<CoefficientModule>) -> Result<CohomologySpace> {
    let size = module.dim() as u64;
    if size > COCYCLE_SPACE_CAP {
        return Err(CohomologyError::SizeCap { what: "coefficient module", size, cap: COCYCLE_SPACE_CAP });
    }
    let g = &module.group;
    let field = g.field();
    let n = g.order();
    let dim = module.dim();
    let slots = non_identity(g);
    let gens = g.generators();

    // Equation block (k, τ) holds u_{sτ} - s·u_τ - u_s for s = gens[k].
    let block = |k: usize, tau: usize| ((k * n + tau) * dim) as u32;
    let actions: Vec<Vec<SparseVec>> = gens
        .iter()
        .map(|&s| (0..dim).map(|j| Ok(module.coords(&module.act(s, &module.basis_element(j))?))).collect())
        .collect::<Result<_>>()?;
    let mut columns = Echelon::new(field, true);
    for &x in &slots {
        for j in 0..dim {
            let mut col: Vec<(u32, u32)> = Vec::new();
            for (k, &s) in gens.iter().enumerate() {
                // x = s·τ for τ = s^{-1}x.
                let tau = g.mul(g.inverse_of(s), x);
                if tau != g.identity() {
                    col.push((block(k, tau) + j as u32, 1));
                }
                for &(i, c) in &actions[k][j] {
                    col.push((block(k, x) + i, field.neg(c)));
                }
                if s == x {
                    for tau in 0..n {
                        if tau != g.identity() {
                            col.push((block(k, tau) + j as u32, field.neg(1)));
                        }
                    }
                }
            }
            columns.insert(collect_sparse(field, col));
        }
    }
    let cocycles: Vec<Cocycle1> = columns.kernel().iter().map(|v| Cocycle1::from_vector(module, v)).collect();

    let mut span = Echelon::new(field, false);
    for j in 0..dim {
        span.insert(Cocycle1::coboundary(module, &module.basis_element(j))?.vector());
    }
    let dim_b = span.rank();
    let mut classes = Vec::new();
    for z in &cocycles {
        if span.insert(z.vector()).is_some() {
            classes.push(z.clone());
        }
    }
    Ok(CohomologySpace { module: module.clone(), dim_z: cocycles.len(), dim_b, classes, cocycles })
}

/// Some `b` with `(σ - 1)·b = g_σ` for all `σ`, or `None` if the class is
/// nonzero. Matching on generators suffices since both sides are cocycles.
pub fn coboundary_witness(g: &Cocycle1) -> Result<Option<Polynomial>> {
    let module = &g.module;
    let grp = &module.group;
    let field = grp.field();
    let dim = module.dim() as u32;
    let gens = grp.generators();
    let per_gen: Vec<Vec<SparseVec>> = gens.iter().map(|&s| module.difference_columns(s)).collect::<Result<_>>()?;
    let mut columns = Echelon::new(field, true);
    for j in 0..module.dim() {
        let mut col = Vec::new();
        for (k, cols) in per_gen.iter().enumerate() {
            col.extend(cols[j].iter().map(|&(i, c)| (k as u32 * dim + i, c)));
        }
        columns.insert(col);
    }
    let mut target = Vec::new();
    for (k, &s) in gens.iter().enumerate() {
        target.extend(module.coords(&g.values[s]).into_iter().map(|(i, c)| (k as u32 * dim + i, c)));
    }
    let red = columns.reduce(&target);
    if !red.remainder.is_empty() {
        return Ok(None);
    }
    let b = module.element(red.combination.expect("tracked"));
    debug_assert!(Cocycle1::coboundary(module, &b).map(|c| c == *g).unwrap_or(false));
    Ok(Some(b))
}

pub fn is_coboundary(g: &Cocycle1) -> Result<bool> {
    Ok(coboundary_witness(g)?.is_some())
}

/// `σ ↦ (g_σ)^{p^m}` in the module of `p^m`-th powers.
pub fn frobenius_power_cocycle(g: &Cocycle1, m: u32) -> Result<Cocycle1> {
    let target = g.module.frobenius_target(m)?;
    let values = g
        .values
        .iter()
        .map(|v| Ok(v.frobenius_power(m)?.reorder(&target.ring)))
        .collect::<Result<Vec<_>>>()?;
    Cocycle1::new(&target, values)
}

/// Witness `b` with `a·g_σ = (σ - 1)·b`, or `None` if `a·g` is a nonzero class.
pub fn annihilates(a: &Polynomial, g: &Cocycle1) -> Result<Option<Polynomial>> {
    let module = &g.module;
    let ModuleKind::Graded { degree } = module.kind else {
        return Err(CohomologyError::NotGraded);
    };
    if !same_ring(a.ring(), &module.ring) {
        return Err(CohomologyError::ModuleMismatch);
    }
    if !a.is_homogeneous() {
        return Err(CohomologyError::NotHomogeneous(a.to_string()));
    }
    if !module.group.fixes(a)? {
        return Err(CohomologyError::NotInvariant(a.to_string()));
    }
    let Some(da) = a.degree() else {
        return Ok(Some(Polynomial::zero(&module.ring)));
    };
    let target = CoefficientModule::graded(&module.group, &module.ring, degree + da)?;
    let values = g.values.iter().map(|v| Ok(a.checked_mul(v)?)).collect::<Result<Vec<_>>>()?;
    coboundary_witness(&Cocycle1::new(&target, values)?)
}

/// The restriction to a subgroup, re-indexed by the subgroup's own elements.
pub fn restrict(g: &Cocycle1, h: &Subgroup) -> Result<Cocycle1> {
    if !Arc::ptr_eq(h.parent(), &g.module.group) {
        return Err(CohomologyError::NotSubgroup);
    }
    let sub = h.to_group()?;
    let parent_index: Vec<usize> = sub
        .elements()
        .iter()
        .map(|e| g.module.group.index_of(e.matrix()).expect("subgroup elements lie in the parent"))
        .collect();
    let module = g.module.restricted(&sub, &parent_index)?;
    let values = parent_index.iter().map(|&x| g.values[x].clone()).collect();
    Cocycle1::new(&module, values)
}

/// Outcome of testing `g^{p^m} ≠ 0` for all `m ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrobeniusCertificate {
    /// Proof: Frobenius is injective on `H^1` with trivial coefficients.
    TrivialCoefficients,
    /// Proof: `k[V]` splits into monomial-orbit summands for a permutation action.
    Permutation,
    /// Proof: for a character module over `F_{p^n}`, `g^{p^n} = g` exactly,
    /// and `m < period` was checked.
    Periodic { period: u32 },
    /// Not a proof: `m ≤ up_to` was checked; `up_to < requested` means the
    /// module size cap was reached first.
    Checked { up_to: u32, requested: u32 },
    /// `g^{p^m}` is a coboundary, `m` least.
    Refuted { m: u32 },
}

impl FrobeniusCertificate {
    pub fn is_proof(&self) -> bool {
        !matches!(self, FrobeniusCertificate::Checked { .. })
    }
}

impl fmt::Display for FrobeniusCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrobeniusCertificate::TrivialCoefficients => f.write_str("CERTIFIED (trivial coefficients)"),
            FrobeniusCertificate::Permutation => f.write_str("CERTIFIED (permutation representation)"),
            FrobeniusCertificate::Periodic { period } => write!(f, "CERTIFIED (Frobenius period {period})"),
            FrobeniusCertificate::Checked { up_to, requested } if up_to < requested => {
                write!(f, "CHECKED up to m = {up_to} of {requested}, size cap reached (not a proof)")
            }
            FrobeniusCertificate::Checked { up_to, .. } => write!(f, "CHECKED up to m = {up_to} (not a proof)"),
            FrobeniusCertificate::Refuted { m } => write!(f, "REFUTED at m = {m}"),
        }
    }
}

pub fn nontrivial_all_frobenius(g: &Cocycle1, m_max: Option<u32>) -> Result<FrobeniusCertificate> {
    let m_max = m_max.unwrap_or(DEFAULT_FROBENIUS_M_MAX);
    if is_coboundary(g)? {
        return Err(CohomologyError::TrivialClass);
    }
    let module = &g.module;
    if module.is_trivial() {
        return Ok(FrobeniusCertificate::TrivialCoefficients);
    }
    let graded = matches!(module.kind, ModuleKind::Graded { .. });
    if graded && module.group.is_permutation_group() {
        return Ok(FrobeniusCertificate::Permutation);
    }
    let period = module.group.field().degree();
    for m in 1..=m_max {
        if !graded && m == period {
            return Ok(FrobeniusCertificate::Periodic { period });
        }
        let power = match frobenius_power_cocycle(g, m) {
            Ok(c) => c,
            Err(CohomologyError::SizeCap { .. }) => return Ok(FrobeniusCertificate::Checked { up_to: m - 1, requested: m_max }),
            Err(e) => return Err(e),
        };
        if is_coboundary(&power)? {
            return Ok(FrobeniusCertificate::Refuted { m });
        }
    }
    Ok(FrobeniusCertificate::Checked { up_to: m_max, requested: m_max })
}

/// `dim_{F_p} H^n(G, F_p)` from the normalized bar complex: cochains are
/// functions on `(G∖1)^n`.
pub fn bar_hn_trivial(g: &FiniteMatrixGroup, n: u32) -> Result<usize> {
    let r = (g.order() - 1) as u64;
    let size = r.checked_pow(n).unwrap_or(u64::MAX);
    if size > BAR_CAP {
        return Err(CohomologyError::SizeCap { what: "bar cochains", size, cap: BAR_CAP });
    }
    let below = if n == 0 { 0 } else { bar_rank(g, n - 1)? };
    Ok(size as usize - bar_rank(g, n)? - below)
}

/// Rank of `d_n : C^n → C^{n+1}` with trivial coefficients.
fn bar_rank(g: &FiniteMatrixGroup, n: u32) -> Result<usize> {
    let fp = FieldCtx::prime(g.field().characteristic() as u64).expect("characteristic is prime");
    let slots = non_identity(g);
    let r = slots.len();
    let slot_of: HashMap<usize, u32> = slots.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
    let n = n as usize;
    let columns = r.pow(n as u32);
    if r == 0 {
        return Ok(0);
    }
    let encode = |t: &[usize]| -> u32 { t.iter().fold(0u32, |acc, x| acc * r as u32 + slot_of[x]) };
    let minus_one = fp.neg(1);
    let mut rows = Echelon::new(&fp, false);
    let mut t = vec![0usize; n + 1];
    for code in 0..r.pow(n as u32 + 1) {
        let mut c = code;
        for k in (0..=n).rev() {
            t[k] = slots[c % r];
            c /= r;
        }
        let mut row: Vec<(u32, u32)> = vec![(encode(&t[1..]), 1)];
        for i in 0..n {
            let prod = g.mul(t[i], t[i + 1]);
            if prod == g.identity() {
                continue;
            }
            let mut face = t[..i].to_vec();
            face.push(prod);
            face.extend_from_slice(&t[i + 2..]);
            row.push((encode(&face), if i % 2 == 0 { minus_one } else { 1 }));
        }
        row.push((encode(&t[..n]), if n.is_multiple_of(2) { minus_one } else { 1 }));
        rows.insert(collect_sparse(&fp, row));
        if rows.rank() == columns {
            break;
        }
    }
    Ok(rows.rank())
}

/// Classes in one degree whose restriction to every proper subgroup is zero.
#[derive(Debug, Clone)]
pub struct ClassSearch {
    pub degree: u32,
    pub classes: Vec<Cocycle1>,
}

/// Scans degrees `1..=max_degree` (default 5) and returns the lowest degree
/// with a nonzero class restricting to zero on all proper subgroups.
pub fn restriction_trivial_classes(g: &Group, ring: &Ring, max_degree: Option<u32>) -> Result<Option<ClassSearch>> {
    let max_degree = max_degree.unwrap_or(DEFAULT_SEARCH_DEGREE);
    if g.order() > SUBGROUP_SEARCH_CAP {
        return Err(CohomologyError::SizeCap {
            what: "group for subgroup enumeration",
            size: g.order() as u64,
            cap: SUBGROUP_SEARCH_CAP as u64,
        });
    }
    let maximal = maximal_subgroups(g);
    for d in 1..=max_degree {
        let module = CoefficientModule::graded(g, ring, d)?;
        let space = cocycle_space(&module)?;
        if space.dim_h() == 0 {
            continue;
        }
        let classes = vanishing_on(&space, &maximal)?;
        if !classes.is_empty() {
            return Ok(Some(ClassSearch { degree: d, classes }));
        }
    }
    Ok(None)
}

/// Representatives of the classes `z` in `space` with `z|_H ∈ B^1(H)` for
/// every `H` in `subgroups`.
fn vanishing_on(space: &CohomologySpace, subgroups: &[Subgroup]) -> Result<Vec<Cocycle1>> {
    let module = &space.module;
    let field = module.group.field();
    let dim = module.dim() as u32;
    // Row blocks: one per (subgroup, generator) pair.
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    for (k, h) in subgroups.iter().enumerate() {
        for &s in h.generators() {
            blocks.push((k, s));
        }
    }
    let mut columns = Echelon::new(field, true);
    for z in &space.cocycles {
        let mut col = Vec::new();
        for (b, &(_, s)) in blocks.iter().enumerate() {
            col.extend(module.coords(&z.values[s]).into_iter().map(|(i, c)| (b as u32 * dim + i, c)));
        }
        columns.insert(col);
    }
    let diffs: HashMap<usize, Vec<SparseVec>> = blocks
        .iter()
        .map(|&(_, s)| s)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .map(|s| Ok((s, module.difference_columns(s)?)))
        .collect::<Result<_>>()?;
    for k in 0..subgroups.len() {
        for j in 0..module.dim() {
            let mut col = Vec::new();
            for (b, &(kk, s)) in blocks.iter().enumerate() {
                if kk == k {
                    col.extend(diffs[&s][j].iter().map(|&(i, c)| (b as u32 * dim + i, field.neg(c))));
                }
            }
            columns.insert(col);
        }
    }
    let nz = space.cocycles.len() as u32;
    let mut span = Echelon::new(field, false);
    for j in 0..module.dim() {
        span.insert(Cocycle1::coboundary(module, &module.basis_element(j))?.vector());
    }
    let mut out = Vec::new();
    for dep in columns.kernel() {
        let mut z = Cocycle1::zero(module);
        for &(id, c) in dep.iter().filter(|e| e.0 < nz) {
            let scaled = space.cocycles[id as usize].values.iter().map(|v| v.scale(c)).collect();
            z = z.add(&Cocycle1 { module: module.clone(), values: scaled })?;
        }
        if span.insert(z.vector()).is_some() {
            out.push(z);
        }
    }
    Ok(out)
}

/// Maximal proper subgroups, found by closing cyclic subgroups under joins.
fn maximal_subgroups(g: &Group) -> Vec<Subgroup> {
    let order = g.order();
    let mut found: Vec<Subgroup> = Vec::new();
    let mut seen: std::collections::HashSet<Vec<usize>> = std::collections::HashSet::new();
    let mut push = |s: Subgroup, found: &mut Vec<Subgroup>| {
        if s.order() < order && seen.insert(s.elements().to_vec()) {
            found.push(s);
        }
    };
    for x in 0..order {
        push(g.subgroup(&[x]), &mut found);
    }
    let mut i = 0;
    while i < found.len() {
        for j in 0..i {
            let mut gens = found[i].generators().to_vec();
            gens.extend_from_slice(found[j].generators());
            let s = g.subgroup(&gens);
            push(s, &mut found);
        }
        i += 1;
    }
    let contained = |a: &Subgroup, b: &Subgroup| a.order() < b.order() && a.elements().iter().all(|x| b.contains(*x));
    found.iter().filter(|a| !found.iter().any(|b| contained(a, b))).cloned().collect()
}
