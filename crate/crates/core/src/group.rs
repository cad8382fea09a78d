//! Finite matrix groups over a finite field, always fully enumerated.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::gf::{Field, FieldCtx, GfError};
use crate::linalg::{Matrix, MatrixError};
use crate::mpoly::{PolyError, Polynomial};

/// Default bound on the number of enumerated elements.
pub const DEFAULT_GROUP_CAP: usize = 100_000;
/// Bound on the number of points in [`FiniteMatrixGroup::orbits_of_points`].
pub const POINT_CAP: u64 = 1_000_000;
/// Largest group order accepted by the regular representation constructors.
pub const REGULAR_REP_CAP: usize = 24;
/// Multiplication tables are cached up to this order.
const TABLE_CAP: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group has more than {cap} elements")]
    CapExceeded { cap: usize },
    #[error("generator {index} is singular")]
    SingularGenerator { index: usize },
    #[error("generators must be square {dim}x{dim} matrices over {field}")]
    ShapeMismatch { dim: usize, field: String },
    #[error("{what} has size {size}, above the cap {cap}")]
    SizeCap { what: &'static str, size: u64, cap: u64 },
    #[error("matrix {0} is not an element of the group")]
    NotAnElement(String),
    #[error("not a group multiplication table: {0}")]
    BadTable(String),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("quotient by the subgroup is not an elementary abelian {p}-group")]
    QuotientNotElementaryAbelian { p: u32 },
    #[error("sigma lies in the subgroup")]
    SigmaInN,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// An invertible matrix with its inverse.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupElement {
    matrix: Matrix,
    inverse: Matrix,
}

impl GroupElement {
    /// `None` if the matrix is singular or not square.
    pub fn new(matrix: Matrix) -> Option<Self> {
        let inverse = matrix.inverse()?;
        Some(GroupElement { matrix, inverse })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    /// `(g·f)(v) = f(g^{-1} v)`: substitutes `x_j ↦ Σ_i (g^{-1})_{ji} x_i`.
    pub fn act(&self, f: &Polynomial) -> Result<Polynomial, PolyError> {
        f.apply_matrix(&self.inverse)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.matrix, f)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.matrix, f)
    }
}

pub type Group = Arc<FiniteMatrixGroup>;

/// One edge of the BFS spanning tree: `element = generators[gen] · parent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeEdge {
    pub element: usize,
    pub gen: usize,
    pub parent: usize,
}

/// A finite subgroup of `GL_d(F_q)` with every element listed, sorted by
/// row-major matrix entries.
pub struct FiniteMatrixGroup {
    field: Field,
    dim: usize,
    elements: Vec<GroupElement>,
    index: HashMap<Vec<u32>, usize>,
    generators: Vec<usize>,
    names: Vec<String>,
    identity: usize,
    inverses: Vec<usize>,
    tree: Vec<TreeEdge>,
    table: OnceLock<Vec<u32>>,
}

impl fmt::Debug for FiniteMatrixGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteMatrixGroup(order {}, dim {}, over {})", self.order(), self.dim, self.field.describe())
    }
}

impl FiniteMatrixGroup {
    /// Closure of the generators by breadth-first search. Names default to
    /// `g1, g2, …` when `names` is empty.
    pub fn enumerate(
        field: &Field,
        dim: usize,
        generators: &[Matrix],
        names: &[String],
        cap: Option<usize>,
    ) -> Result<Group, GroupError> {
        let cap = cap.unwrap_or(DEFAULT_GROUP_CAP);
        let shape = || GroupError::ShapeMismatch { dim, field: field.describe() };
        let mut gens = Vec::with_capacity(generators.len());
        for (index, m) in generators.iter().enumerate() {
            if m.rows() != dim || m.cols() != dim || **m.field() != **field {
                return Err(shape());
            }
            gens.push(GroupElement::new(m.clone()).ok_or(GroupError::SingularGenerator { index })?);
        }
        if !names.is_empty() && names.len() != gens.len() {
            return Err(shape());
        }
        let names: Vec<String> = if names.is_empty() {
            (1..=gens.len()).map(|i| format!("g{i}")).collect()
        } else {
            names.to_vec()
        };

        let id = Matrix::identity(field, dim);
        let mut found: Vec<Matrix> = vec![id.clone()];
        let mut seen: HashMap<Vec<u32>, usize> = HashMap::from([(id.data().to_vec(), 0)]);
        let mut edges: Vec<TreeEdge> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (s, g) in gens.iter().enumerate() {
                let y = g.matrix.mul(&found[x])?;
                if seen.contains_key(y.data()) {
                    continue;
                }
                if found.len() == cap {
                    return Err(GroupError::CapExceeded { cap });
                }
                let k = found.len();
                seen.insert(y.data().to_vec(), k);
                edges.push(TreeEdge { element: k, gen: s, parent: x });
                found.push(y);
                queue.push_back(k);
            }
        }

        // Canonical order: lexicographic on the row-major entries.
        let mut order: Vec<usize> = (0..found.len()).collect();
        order.sort_by(|&a, &b| found[a].data().cmp(found[b].data()));
        let mut rank = vec![0usize; found.len()];
        for (pos, &old) in order.iter().enumerate() {
            rank[old] = pos;
        }
        let mut slots: Vec<Option<Matrix>> = found.into_iter().map(Some).collect();
        let mut elements = Vec::with_capacity(order.len());
        for &old in &order {
            let m = slots[old].take().expect("each element moved once");
            elements.push(GroupElement::new(m).expect("group elements are invertible"));
        }
        let index: HashMap<Vec<u32>, usize> =
            elements.iter().enumerate().map(|(i, e)| (e.matrix.data().to_vec(), i)).collect();
        let inverses = elements.iter().map(|e| index[e.inverse.data()]).collect();
        let generators = gens.iter().map(|g| index[g.matrix.data()]).collect();
        let tree = edges
            .into_iter()
            .map(|e| TreeEdge { element: rank[e.element], gen: e.gen, parent: rank[e.parent] })
            .collect();
        Ok(Arc::new(FiniteMatrixGroup {
            field: field.clone(),
            dim,
            identity: index[id.data()],
            elements,
            index,
            generators,
            names,
            inverses,
            tree,
            table: OnceLock::new(),
        }))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    /// Element indices of the generators, in the order given.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn generator_names(&self) -> &[String] {
        &self.names
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse_of(&self, i: usize) -> usize {
        self.inverses[i]
    }

    pub fn index_of(&self, m: &Matrix) -> Option<usize> {
        if m.rows() != self.dim || m.cols() != self.dim || **m.field() != *self.field {
            return None;
        }
        self.index.get(m.data()).copied()
    }

    /// BFS spanning tree edges in discovery order; every non-identity
    /// element appears exactly once, after its parent.
    pub fn spanning_tree(&self) -> &[TreeEdge] {
        &self.tree
    }

    /// A word in the generator names for every element, read along the
    /// spanning tree; the identity is `1`.
    pub fn words(&self) -> Vec<String> {
        let mut out = vec![String::new(); self.order()];
        out[self.identity] = "1".into();
        for e in &self.tree {
            let name = &self.names[e.gen];
            out[e.element] = if e.parent == self.identity { name.clone() } else { format!("{name}*{}", out[e.parent]) };
        }
        out
    }

    /// Index of the product `a·b`.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        let n = self.order();
        if n <= TABLE_CAP {
            let table = self.table.get_or_init(|| {
                let mut t = vec![0u32; n * n];
                for i in 0..n {
                    for j in 0..n {
                        t[i * n + j] = self.mul_direct(i, j) as u32;
                    }
                }
                t
            });
            return table[a * n + b] as usize;
        }
        self.mul_direct(a, b)
    }

    fn mul_direct(&self, a: usize, b: usize) -> usize {
        let m = self.elements[a].matrix.mul(&self.elements[b].matrix).expect("square matrices of equal size");
        self.index[m.data()]
    }

    pub fn power(&self, a: usize, mut k: u64) -> usize {
        let (mut acc, mut base) = (self.identity, a);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// `g h g^{-1}`.
    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inverses[g])
    }

    /// The action of element `g` on a polynomial in `dim` variables.
    pub fn act(&self, g: usize, f: &Polynomial) -> Result<Polynomial, PolyError> {
        self.elements[g].act(f)
    }

    /// True if every generator fixes `f`.
    pub fn fixes(&self, f: &Polynomial) -> Result<bool, PolyError> {
        for &g in &self.generators {
            if self.act(g, f)? != *f {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True if every element is a permutation matrix.
    pub fn is_permutation_group(&self) -> bool {
        self.generators.iter().all(|&g| self.elements[g].matrix.is_permutation())
    }

    /// Sorted element indices of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.order()];
        inside[self.identity] = true;
        let mut members = vec![self.identity];
        let mut cursor = 0;
        while cursor < members.len() {
            let x = members[cursor];
            cursor += 1;
            for &s in gens {
                let y = self.mul(s, x);
                if !inside[y] {
                    inside[y] = true;
                    members.push(y);
                }
            }
        }
        members.sort_unstable();
        members
    }

    /// The subgroup generated by the given elements.
    pub fn subgroup(self: &Arc<Self>, gens: &[usize]) -> Subgroup {
        Subgroup { parent: self.clone(), generators: gens.to_vec(), elements: self.closure(gens) }
    }

    /// Subgroup generated by matrices, which must be group elements.
    pub fn subgroup_from_matrices(self: &Arc<Self>, gens: &[Matrix]) -> Result<Subgroup, GroupError> {
        let idx = gens
            .iter()
            .map(|m| self.index_of(m).ok_or_else(|| GroupError::NotAnElement(m.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.subgroup(&idx))
    }

    /// Kernel of `g - I`.
    pub fn fixed_space(&self, g: usize) -> FixedSpace {
        FixedSpace::of(&self.field, self.dim, &[&self.elements[g].matrix])
    }

    /// Common fixed space of the generators, which is `V^G`.
    pub fn invariant_space(&self) -> FixedSpace {
        let ms: Vec<&Matrix> = self.generators.iter().map(|&g| &self.elements[g].matrix).collect();
        FixedSpace::of(&self.field, self.dim, &ms)
    }

    /// `codim V^g = rank(g - I)`.
    pub fn codim(&self, g: usize) -> usize {
        self.fixed_space(g).codim()
    }

    /// The `G`-orbits on `V(F_{q^e})`.
    pub fn orbits_of_points(&self, e: u32) -> Result<OrbitPartition, GroupError> {
        let base = self.field.order() as u64;
        let q = base.checked_pow(e).filter(|&q| q <= POINT_CAP).ok_or(GroupError::SizeCap {
            what: "point field",
            size: u64::MAX,
            cap: POINT_CAP,
        })?;
        let points = q
            .checked_pow(self.dim as u32)
            .filter(|&n| n <= POINT_CAP)
            .ok_or(GroupError::SizeCap { what: "point set", size: q.saturating_pow(self.dim as u32), cap: POINT_CAP })?;
        let ext = if e == 1 {
            self.field.clone()
        } else {
            FieldCtx::new(self.field.characteristic() as u64, self.field.degree() * e)?
        };
        let gens: Vec<Matrix> = self
            .generators
            .iter()
            .map(|&g| self.elements[g].matrix.embed(&ext))
            .collect::<Result<_, _>>()?;
        let coder = PointCoder { q: q as u32, dim: self.dim };
        let mut orbit_of = vec![u32::MAX; points as usize];
        let mut orbits: Vec<Vec<u32>> = Vec::new();
        for start in 0..points as u32 {
            if orbit_of[start as usize] != u32::MAX {
                continue;
            }
            let id = orbits.len() as u32;
            orbit_of[start as usize] = id;
            let mut members = vec![start];
            let mut cursor = 0;
            while cursor < members.len() {
                let v = coder.decode(members[cursor]);
                cursor += 1;
                for g in &gens {
                    let w = coder.encode(&g.mul_vec(&v));
                    if orbit_of[w as usize] == u32::MAX {
                        orbit_of[w as usize] = id;
                        members.push(w);
                    }
                }
            }
            members.sort_unstable();
            orbits.push(members);
        }
        // Burnside: |orbits| · |G| = Σ_g |V^g|.
        let fixed_total: u64 = (0..self.order()).map(|g| q.pow(self.fixed_space(g).dim() as u32)).sum();
        assert_eq!(
            fixed_total,
            orbits.len() as u64 * self.order() as u64,
            "orbit count disagrees with the Burnside count"
        );
        Ok(OrbitPartition { field: ext, coder, orbit_of, orbits })
    }

    pub fn bireflection_analysis(&self) -> BireflectionReport {
        let codims: Vec<usize> = (0..self.order()).map(|g| self.codim(g)).collect();
        let nonid = |g: &usize| *g != self.identity;
        let reflections: Vec<usize> = (0..self.order()).filter(nonid).filter(|&g| codims[g] <= 1).collect();
        let bireflections: Vec<usize> = (0..self.order()).filter(nonid).filter(|&g| codims[g] <= 2).collect();
        let reflection_subgroup_order = self.closure(&reflections).len();
        let bireflection_subgroup_order = self.closure(&bireflections).len();
        BireflectionReport {
            group_order: self.order(),
            codims,
            reflections,
            bireflections,
            reflection_subgroup_order,
            bireflection_subgroup_order,
        }
    }

    /// Decides whether `V^σ ⊄ V^b` for every bireflection `b ∉ N`, after
    /// verifying that `N` is normal with elementary abelian `p`-quotient and
    /// that `σ ∉ N`.
    pub fn check_bireflection_criterion(&self, n: &Subgroup, sigma: usize) -> Result<bool, GroupError> {
        let in_n = n.membership();
        let all = 0..self.order();
        if all.clone().any(|g| n.elements.iter().any(|&h| !in_n[self.conjugate(g, h)])) {
            return Err(GroupError::NotNormal);
        }
        let p = self.field.characteristic();
        let exponent_ok = all.clone().all(|g| in_n[self.power(g, p as u64)]);
        let abelian_ok = all.clone().all(|g| {
            (0..self.order()).all(|h| {
                let comm = self.mul(self.mul(g, h), self.mul(self.inverses[g], self.inverses[h]));
                in_n[comm]
            })
        });
        if !exponent_ok || !abelian_ok {
            return Err(GroupError::QuotientNotElementaryAbelian { p });
        }
        if in_n[sigma] {
            return Err(GroupError::SigmaInN);
        }
        let fixed_sigma = self.fixed_space(sigma);
        Ok(all.filter(|&b| !in_n[b]).all(|b| {
            let fb = self.fixed_space(b);
            fb.codim() > 2 || !fixed_sigma.is_contained_in(&fb)
        }))
    }

    /// The diagonal action on `V^{⊕k}`.
    pub fn direct_sum(&self, k: usize) -> Result<Group, GroupError> {
        assert!(k >= 1, "direct sum needs at least one copy");
        let gens: Vec<Matrix> = self.generators.iter().map(|&g| self.elements[g].matrix.block_diagonal(k)).collect();
        let cap = self.order().max(1);
        FiniteMatrixGroup::enumerate(&self.field, self.dim * k, &gens, &self.names, Some(cap))
    }
}

/// A subgroup resolved to element indices of its parent.
#[derive(Clone)]
pub struct Subgroup {
    parent: Group,
    generators: Vec<usize>,
    elements: Vec<usize>,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(order {} of {})", self.elements.len(), self.parent.order())
    }
}

impl Subgroup {
    pub fn parent(&self) -> &Group {
        &self.parent
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Sorted parent indices.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    fn membership(&self) -> Vec<bool> {
        let mut inside = vec![false; self.parent.order()];
        for &g in &self.elements {
            inside[g] = true;
        }
        inside
    }

    /// Common fixed space of the subgroup.
    pub fn fixed_space(&self) -> FixedSpace {
        let ms: Vec<&Matrix> = self.generators.iter().map(|&g| self.parent.element(g).matrix()).collect();
        FixedSpace::of(self.parent.field(), self.parent.dim(), &ms)
    }

    pub fn is_normal(&self) -> bool {
        let inside = self.membership();
        (0..self.parent.order()).all(|g| self.elements.iter().all(|&h| inside[self.parent.conjugate(g, h)]))
    }

    /// The subgroup as a matrix group of its own, on the same generators.
    pub fn to_group(&self) -> Result<Group, GroupError> {
        let gens: Vec<Matrix> = self.generators.iter().map(|&g| self.parent.element(g).matrix().clone()).collect();
        FiniteMatrixGroup::enumerate(self.parent.field(), self.parent.dim(), &gens, &[], Some(self.order().max(1)))
    }
}


/// A subspace of `F_q^d` given by a reduced echelon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedSpace {
    field: Field,
    ambient: usize,
    basis: Vec<Vec<u32>>,
}

impl FixedSpace {
    /// Common kernel of `m - I` over the given matrices.
    pub fn of(field: &Field, dim: usize, matrices: &[&Matrix]) -> FixedSpace {
        let mut stacked = Matrix::zeros(field, matrices.len() * dim, dim);
        for (b, m) in matrices.iter().enumerate() {
            for i in 0..dim {
                for j in 0..dim {
                    let v = if i == j { field.sub(m.get(i, j), 1) } else { m.get(i, j) };
                    stacked.set(b * dim + i, j, v);
                }
            }
        }
        let kernel = stacked.kernel();
        let basis = if kernel.is_empty() {
            Vec::new()
        } else {
            let (r, pivots) = Matrix::from_rows(field, &kernel).expect("rectangular").rref();
            (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
        };
        FixedSpace { field: field.clone(), ambient: dim, basis }
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// With a reduced echelon basis, `v` is in the span iff it equals
    /// `Σ v[pivot_i] · row_i`.
    pub fn contains(&self, v: &[u32]) -> bool {
        let f = &self.field;
        let mut rest = v.to_vec();
        for row in &self.basis {
            let pivot = row.iter().position(|&c| c != 0).expect("basis rows are nonzero");
            let c = rest[pivot];
            if c != 0 {
                for (r, &a) in rest.iter_mut().zip(row) {
                    *r = f.sub(*r, f.mul(c, a));
                }
            }
        }
        rest.iter().all(|&c| c == 0)
    }

    pub fn is_contained_in(&self, other: &FixedSpace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }
}

/// Mixed-radix indexing of `F_Q^d`: coordinate `i` is digit `i` in base `Q`.
#[derive(Debug, Clone, Copy)]
struct PointCoder {
    q: u32,
    dim: usize,
}

impl PointCoder {
    fn decode(&self, mut idx: u32) -> Vec<u32> {
        (0..self.dim)
            .map(|_| {
                let c = idx % self.q;
                idx /= self.q;
                c
            })
            .collect()
    }

    fn encode(&self, v: &[u32]) -> u32 {
        v.iter().rev().fold(0, |acc, &c| acc * self.q + c)
    }
}

/// Partition of `V(F_{q^e})` into orbits. Orbits are sorted by their
/// smallest point index; points within an orbit are sorted.
#[derive(Debug, Clone)]
pub struct OrbitPartition {
    field: Field,
    coder: PointCoder,
    orbit_of: Vec<u32>,
    orbits: Vec<Vec<u32>>,
}

impl OrbitPartition {
    /// The field `F_{q^e}` the points live in.
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn num_points(&self) -> usize {
        self.orbit_of.len()
    }

    pub fn num_orbits(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbits(&self) -> &[Vec<u32>] {
        &self.orbits
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }

    pub fn orbit_of(&self, point: u32) -> usize {
        self.orbit_of[point as usize] as usize
    }

    /// Coordinates (field codes) of a point index.
    pub fn point(&self, idx: u32) -> Vec<u32> {
        self.coder.decode(idx)
    }

    pub fn index_of(&self, coords: &[u32]) -> u32 {
        self.coder.encode(coords)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BireflectionReport {
    pub group_order: usize,
    /// Fixed-space codimension of every element.
    pub codims: Vec<usize>,
    /// Non-identity elements with codimension at most 1.
    pub reflections: Vec<usize>,
    /// Non-identity elements with codimension at most 2.
    pub bireflections: Vec<usize>,
    pub reflection_subgroup_order: usize,
    pub bireflection_subgroup_order: usize,
}

impl BireflectionReport {
    pub fn generated_by_reflections(&self) -> bool {
        self.reflection_subgroup_order == self.group_order
    }

    pub fn generated_by_bireflections(&self) -> bool {
        self.bireflection_subgroup_order == self.group_order
    }
}

/// Left-regular representation of the group with multiplication table
/// `table[a][b] = a·b`: `L_g e_h = e_{gh}`.
pub fn regular_representation(field: &Field, table: &[Vec<usize>]) -> Result<Group, GroupError> {
    let n = table.len();
    if n > REGULAR_REP_CAP {
        return Err(GroupError::SizeCap { what: "group order", size: n as u64, cap: REGULAR_REP_CAP as u64 });
    }
    validate_table(table)?;
    let e = (0..n).find(|&a| (0..n).all(|b| table[a][b] == b)).expect("validated");
    // Greedy generating set: add each element not yet generated.
    let mut gens: Vec<usize> = Vec::new();
    let mut generated = vec![e];
    for g in 0..n {
        if generated.contains(&g) {
            continue;
        }
        gens.push(g);
        generated = table_closure(table, e, &gens);
    }
    let mats: Vec<Matrix> = gens
        .iter()
        .map(|&g| {
            let mut m = Matrix::zeros(field, n, n);
            for (h, &image) in table[g].iter().enumerate() {
                m.set(image, h, 1);
            }
            m
        })
        .collect();
    FiniteMatrixGroup::enumerate(field, n, &mats, &[], Some(n))
}

/// Regular representation of the permutation group generated by `gens`,
/// each a permutation of `0..k` given as its image list.
pub fn regular_representation_of_permutations(field: &Field, gens: &[Vec<usize>]) -> Result<Group, GroupError> {
    let k = gens.first().map_or(0, Vec::len);
    for g in gens {
        let mut sorted = g.clone();
        sorted.sort_unstable();
        if g.len() != k || sorted != (0..k).collect::<Vec<_>>() {
            return Err(GroupError::BadTable(format!("{g:?} is not a permutation of 0..{k}")));
        }
    }
    let id: Vec<usize> = (0..k).collect();
    let mut elems = vec![id.clone()];
    let mut cursor = 0;
    while cursor < elems.len() {
        let x = elems[cursor].clone();
        cursor += 1;
        for g in gens {
            let y: Vec<usize> = x.iter().map(|&i| g[i]).collect();
            if !elems.contains(&y) {
                if elems.len() == REGULAR_REP_CAP {
                    return Err(GroupError::SizeCap {
                        what: "group order",
                        size: REGULAR_REP_CAP as u64 + 1,
                        cap: REGULAR_REP_CAP as u64,
                    });
                }
                elems.push(y);
            }
        }
    }
    elems.sort();
    let pos = |p: &Vec<usize>| elems.iter().position(|q| q == p).expect("closed");
    // (a·b)(i) = a(b(i)).
    let table: Vec<Vec<usize>> = elems
        .iter()
        .map(|a| elems.iter().map(|b| pos(&b.iter().map(|&i| a[i]).collect())).collect())
        .collect();
    regular_representation(field, &table)
}

fn validate_table(table: &[Vec<usize>]) -> Result<(), GroupError> {
    let n = table.len();
    let bad = |m: &str| Err(GroupError::BadTable(m.into()));
    if n == 0 {
        return bad("empty table");
    }
    if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
        return bad("table must be square with entries below its size");
    }
    let latin = (0..n).all(|a| {
        let mut row_seen = vec![false; n];
        let mut col_seen = vec![false; n];
        (0..n).all(|b| {
            let fresh = !row_seen[table[a][b]] && !col_seen[table[b][a]];
            row_seen[table[a][b]] = true;
            col_seen[table[b][a]] = true;
            fresh
        })
    });
    if !latin {
        return bad("rows and columns must be permutations");
    }
    if !(0..n).any(|e| (0..n).all(|b| table[e][b] == b && table[b][e] == b)) {
        return bad("no identity element");
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if table[table[a][b]][c] != table[a][table[b][c]] {
                    return bad("multiplication is not associative");
                }
            }
        }
    }
    Ok(())
}

fn table_closure(table: &[Vec<usize>], e: usize, gens: &[usize]) -> Vec<usize> {
    let mut members = vec![e];
    let mut cursor = 0;
    while cursor < members.len() {
        let x = members[cursor];
        cursor += 1;
        for &g in gens {
            let y = table[g][x];
            if !members.contains(&y) {
                members.push(y);
            }
        }
    }
    members
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::mpoly::PolyRing;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn vars(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    fn ring_for(g: &Group) -> crate::mpoly::Ring {
        let names = vars(g.dim());
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        PolyRing::new(g.field(), &refs).unwrap()
    }

    #[test]
    fn enumeration_orders() {
        assert_eq!(c4_perm().order(), 4);
        assert_eq!(klein().order(), 4);
        assert_eq!(trivial(2, 3).order(), 1);
        assert_eq!(c4_scalar5().order(), 4);
    }

    #[test]
    fn reflection_group_is_the_parameter_group() {
        // Oracle: the 16 matrices written down from their parameters.
        let g = reflection_group(3);
        let f = g.field().clone();
        let expected: HashSet<Vec<u32>> = (0..16u32)
            .map(|bits| {
                let alpha: Vec<u32> = (0..4).map(|i| (bits >> i) & 1).collect();
                reflection_matrix(&f, 3, &alpha).data().to_vec()
            })
            .collect();
        let got: HashSet<Vec<u32>> = g.elements().iter().map(|e| e.matrix().data().to_vec()).collect();
        assert_eq!(g.order(), 16);
        assert_eq!(got, expected);
    }

    #[test]
    fn enumeration_errors() {
        let f = FieldCtx::prime(2).unwrap();
        let sigma = perm_matrix(&f, &[1, 2, 3, 0]);
        assert_eq!(
            FiniteMatrixGroup::enumerate(&f, 4, std::slice::from_ref(&sigma), &[], Some(3)).unwrap_err(),
            GroupError::CapExceeded { cap: 3 }
        );
        let singular = Matrix::parse(&f, "[[1,1],[1,1]]").unwrap();
        assert_eq!(
            FiniteMatrixGroup::enumerate(&f, 2, &[singular], &[], None).unwrap_err(),
            GroupError::SingularGenerator { index: 0 }
        );
        assert!(matches!(
            FiniteMatrixGroup::enumerate(&f, 3, &[sigma], &[], None),
            Err(GroupError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn elements_are_sorted_and_tree_spans() {
        let g = reflection_group(3);
        assert!(g.elements().windows(2).all(|w| w[0].matrix().data() < w[1].matrix().data()));
        assert_eq!(g.spanning_tree().len(), g.order() - 1);
        for e in g.spanning_tree() {
            assert_eq!(g.mul(g.generators()[e.gen], e.parent), e.element);
        }
    }

    #[test]
    fn action_on_c4_invariants() {
        let g = c4_perm();
        let r = ring_for(&g);
        let sigma = g.generators()[0];
        assert_eq!(g.act(sigma, &r.parse("x1").unwrap()).unwrap(), r.parse("x2").unwrap());
        let c2 = r.parse("x1*x3 + x2*x4").unwrap();
        assert_eq!(g.act(sigma, &c2).unwrap(), c2);
        let f = r.parse("x1^3*x2 + x4").unwrap();
        assert_eq!(g.act(g.identity(), &f).unwrap(), f);
        assert!(g.fixes(&r.parse("x1*x2*x3*x4").unwrap()).unwrap());
        assert!(!g.fixes(&r.parse("x1").unwrap()).unwrap());
    }

    /// Orbit count by applying every element to every point.
    fn brute_orbit_count(g: &Group, e: u32) -> usize {
        let q = (g.field().order() as u64).pow(e) as u32;
        let ext = if e == 1 { g.field().clone() } else { FieldCtx::new(g.field().characteristic() as u64, g.field().degree() * e).unwrap() };
        let mats: Vec<Matrix> = g.elements().iter().map(|x| x.matrix().embed(&ext).unwrap()).collect();
        let coder = PointCoder { q, dim: g.dim() };
        let n = q.pow(g.dim() as u32);
        (0..n)
            .filter(|&p| {
                let v = coder.decode(p);
                mats.iter().all(|m| coder.encode(&m.mul_vec(&v)) >= p)
            })
            .count()
    }

    #[test]
    fn orbit_counts() {
        let c4 = c4_perm().orbits_of_points(1).unwrap();
        assert_eq!((c4.num_points(), c4.num_orbits()), (16, 6));
        let k = klein().orbits_of_points(1).unwrap();
        assert_eq!((k.num_points(), k.num_orbits()), (32, 14));
        assert_eq!(trivial(2, 1).orbits_of_points(1).unwrap().num_orbits(), 2);
        for g in [c4_perm(), klein(), c4_scalar5(), reflection_group(3)] {
            for e in [1, 2] {
                let Ok(part) = g.orbits_of_points(e) else { continue };
                assert_eq!(part.num_orbits(), brute_orbit_count(&g, e));
            }
        }
        assert!(matches!(reflection_group(3).orbits_of_points(3), Err(GroupError::SizeCap { .. })));
    }

    #[test]
    fn orbit_partition_is_consistent() {
        let g = c4_perm();
        let part = g.orbits_of_points(2).unwrap();
        assert_eq!(part.num_points(), 256);
        assert_eq!(part.orbit_sizes().iter().sum::<usize>(), 256);
        for (i, orbit) in part.orbits().iter().enumerate() {
            assert_eq!(g.order() % orbit.len(), 0);
            assert!(orbit.iter().all(|&p| part.orbit_of(p) == i));
            assert_eq!(part.index_of(&part.point(orbit[0])), orbit[0]);
        }
        assert!(part.orbits().windows(2).all(|w| w[0][0] < w[1][0]));
    }

    #[test]
    fn klein_fixed_spaces() {
        let g = klein();
        let sigma = g.generators()[0];
        let fs = g.fixed_space(sigma);
        assert_eq!(fs.codim(), 2);
        // v3 = v4 = 0.
        assert_eq!(fs.basis(), &[vec![1, 0, 0, 0, 0], vec![0, 1, 0, 0, 0], vec![0, 0, 0, 0, 1]]);
        assert_eq!(g.invariant_space().codim(), 3);
        assert_eq!(g.fixed_space(g.identity()).codim(), 0);
        assert_eq!(g.subgroup(&[sigma]).fixed_space(), fs);
    }

    #[test]
    fn bireflection_reports() {
        let k = klein().bireflection_analysis();
        assert_eq!(k.bireflections.len(), 3);
        assert!(k.generated_by_bireflections());

        let r = reflection_group(3);
        let rep = r.bireflection_analysis();
        assert!(r.generators().iter().all(|g| rep.reflections.contains(g)));
        assert!(rep.generated_by_reflections());

        let t = trivial(3, 2).bireflection_analysis();
        assert!(t.bireflections.is_empty() && t.generated_by_bireflections());
    }

    #[test]
    fn bireflection_criterion_on_reflection_group() {
        let g = reflection_group(3);
        let f = g.field().clone();
        let n_gens: Vec<Matrix> = (0..3)
            .map(|i| {
                let alpha: Vec<u32> = (0..4).map(|j| u32::from(i == j)).collect();
                reflection_matrix(&f, 3, &alpha)
            })
            .collect();
        let n = g.subgroup_from_matrices(&n_gens).unwrap();
        assert_eq!(n.order(), 8);
        let sigma = g.index_of(&reflection_matrix(&f, 3, &[1, 1, 1, 1])).unwrap();
        assert!(g.check_bireflection_criterion(&n, sigma).unwrap());
        assert_eq!(g.check_bireflection_criterion(&n, g.identity()).unwrap_err(), GroupError::SigmaInN);
        // A bireflection sigma outside N fails trivially.
        let b = g.index_of(&reflection_matrix(&f, 3, &[0, 0, 0, 1])).unwrap();
        assert!(g.codim(b) <= 2);
        assert!(!g.check_bireflection_criterion(&n, b).unwrap());
    }

    #[test]
    fn bireflection_criterion_on_klein() {
        let g = klein();
        let (sigma, tau) = (g.generators()[0], g.generators()[1]);
        let n = g.subgroup(&[sigma]);
        assert!(!g.check_bireflection_criterion(&n, tau).unwrap());
        let trivial_n = g.subgroup(&[]);
        assert!(g.check_bireflection_criterion(&trivial_n, tau).is_ok());
    }

    #[test]
    fn criterion_preconditions() {
        // S3 on three points over F_3: ⟨(1 2)⟩ is not normal; A3 has quotient
        // of order 2, not a 3-group.
        let f = FieldCtx::prime(3).unwrap();
        let s = perm_matrix(&f, &[1, 0, 2]);
        let c = perm_matrix(&f, &[1, 2, 0]);
        let g = FiniteMatrixGroup::enumerate(&f, 3, &[s.clone(), c.clone()], &[], None).unwrap();
        assert_eq!(g.order(), 6);
        let h = g.subgroup_from_matrices(std::slice::from_ref(&s)).unwrap();
        assert!(!h.is_normal());
        assert_eq!(g.check_bireflection_criterion(&h, g.index_of(&c).unwrap()).unwrap_err(), GroupError::NotNormal);
        let a3 = g.subgroup_from_matrices(&[c]).unwrap();
        assert!(a3.is_normal());
        assert_eq!(
            g.check_bireflection_criterion(&a3, g.index_of(&s).unwrap()).unwrap_err(),
            GroupError::QuotientNotElementaryAbelian { p: 3 }
        );
    }

    #[test]
    fn conjugates_of_bireflections_are_bireflections() {
        for g in [klein(), reflection_group(3), c4_perm(), c4_scalar5()] {
            let rep = g.bireflection_analysis();
            for &b in &rep.bireflections {
                for x in 0..g.order() {
                    assert!(rep.bireflections.contains(&g.conjugate(x, b)));
                }
            }
        }
    }

    #[test]
    fn fixed_space_of_inverse() {
        for g in [klein(), reflection_group(3), c4_perm(), c4_scalar5()] {
            for x in 0..g.order() {
                assert_eq!(g.fixed_space(x), g.fixed_space(g.inverse_of(x)));
            }
        }
    }

    #[test]
    fn direct_sums() {
        let f = FieldCtx::new(2, 2).unwrap();
        let w = f.generator_code().unwrap();
        let a = Matrix::from_rows(&f, &[vec![1, 0], vec![1, 1]]).unwrap();
        let b = Matrix::from_rows(&f, &[vec![1, 0], vec![w, 1]]).unwrap();
        let g = FiniteMatrixGroup::enumerate(&f, 2, &[a, b], &[], None).unwrap();
        let g3 = g.direct_sum(3).unwrap();
        assert_eq!((g3.dim(), g3.order()), (6, g.order()));
        assert_eq!(g.direct_sum(1).unwrap().order(), g.order());
        let t = trivial(2, 2).direct_sum(5).unwrap();
        assert_eq!((t.dim(), t.order()), (10, 1));
    }

    #[test]
    fn regular_representations() {
        let f = FieldCtx::prime(2).unwrap();
        let c4_table: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| (a + b) % 4).collect()).collect();
        let reg = regular_representation(&f, &c4_table).unwrap();
        let perm = c4_perm();
        let set = |g: &Group| g.elements().iter().map(|e| e.matrix().data().to_vec()).collect::<HashSet<_>>();
        assert_eq!(set(&reg), set(&perm));

        let c2 = regular_representation_of_permutations(&f, &[vec![1, 0]]).unwrap();
        assert_eq!(c2.order(), 2);
        let swap = perm_matrix(&f, &[1, 0]);
        assert!(c2.index_of(&swap).is_some());

        let v4_table: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        let v4 = regular_representation(&f, &v4_table).unwrap();
        assert_eq!((v4.dim(), v4.order()), (4, 4));
        assert!(v4.is_permutation_group());

        let s4 = regular_representation_of_permutations(&f, &[vec![1, 0, 2, 3], vec![1, 2, 3, 0]]).unwrap();
        assert_eq!(s4.order(), 24);
        let s5 = regular_representation_of_permutations(&f, &[vec![1, 0, 2, 3, 4], vec![1, 2, 3, 4, 0]]);
        assert!(matches!(s5, Err(GroupError::SizeCap { .. })));
        assert!(matches!(regular_representation(&f, &[vec![0, 0], vec![1, 1]]), Err(GroupError::BadTable(_))));
    }

    fn poly_strategy(nvars: usize, p: u32) -> impl Strategy<Value = Vec<(Vec<u32>, u32)>> {
        proptest::collection::vec((proptest::collection::vec(0u32..3, nvars), 1..p), 0..5)
    }

    fn build(ring: &crate::mpoly::Ring, raw: &[(Vec<u32>, u32)]) -> Polynomial {
        let q = ring.field().order();
        Polynomial::from_terms(
            ring,
            raw.iter().map(|(e, c)| (crate::mpoly::Monomial::from_exponents(e).unwrap(), c % q)),
        )
    }

    proptest! {
        #[test]
        fn act_is_a_left_action_by_automorphisms(a in poly_strategy(5, 2), b in poly_strategy(5, 2),
                                                  g in 0usize..16, h in 0usize..16) {
            let grp = reflection_group(2);
            let r = ring_for(&grp);
            let (g, h) = (g % grp.order(), h % grp.order());
            let (fa, fb) = (build(&r, &a), build(&r, &b));
            let gh = grp.mul(g, h);
            prop_assert_eq!(grp.act(gh, &fa).unwrap(), grp.act(g, &grp.act(h, &fa).unwrap()).unwrap());
            let prod = fa.checked_mul(&fb).unwrap();
            prop_assert_eq!(grp.act(g, &prod).unwrap(),
                            grp.act(g, &fa).unwrap().checked_mul(&grp.act(g, &fb).unwrap()).unwrap());
            prop_assert_eq!(grp.act(g, &fa).unwrap().degree(), fa.degree());
        }

        #[test]
        fn scalar_action_is_a_left_action(a in poly_strategy(2, 5), g in 0usize..4, h in 0usize..4) {
            let grp = c4_scalar5();
            let r = ring_for(&grp);
            let fa = build(&r, &a);
            prop_assert_eq!(grp.act(grp.mul(g, h), &fa).unwrap(), grp.act(g, &grp.act(h, &fa).unwrap()).unwrap());
        }
    }
}
