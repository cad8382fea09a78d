//! Subalgebras `k[s_1,…,s_m] ⊆ k[x]` presented by tag variables `T_i ↦ s_i`.

use crate::groebner::{buchberger, GbError, GroebnerBasis, Ideal};
use crate::mpoly::{MonomialOrder, PolyRing, Polynomial, Ring};

/// Elimination Gröbner basis of `(T_i - s_i)` in `k[x, T]`, with `x` first.
/// A polynomial lies in the subalgebra iff its normal form involves only tags.
pub struct SubalgebraPresentation {
    ambient: Ring,
    generators: Vec<Polynomial>,
    full: Ring,
    tags: Ring,
    gb: GroebnerBasis,
}

impl SubalgebraPresentation {
    /// Tag `T_i` gets the degree of `s_i` as its weight, so the ideal is
    /// homogeneous whenever the generators are.
    pub fn new(ambient: &Ring, generators: &[Polynomial], degree_cap: Option<u32>) -> Result<Self, GbError> {
        if generators.iter().any(|g| !crate::mpoly::same_ring(g.ring(), ambient)) {
            return Err(GbError::RingMismatch);
        }
        let n = ambient.nvars();
        let names: Vec<String> = (1..=generators.len())
            .map(|i| {
                let mut name = format!("T{i}");
                while ambient.var_index(&name).is_some() {
                    name.push('\'');
                }
                name
            })
            .collect();
        let tag_weights: Vec<u32> = generators.iter().map(|g| g.degree().unwrap_or(0).max(1)).collect();
        let mut vars = ambient.variables().to_vec();
        vars.extend(names.iter().cloned());
        let mut weights = ambient.weights().to_vec();
        weights.extend(&tag_weights);
        let full = PolyRing::internal(ambient.field(), vars, MonomialOrder::Elim(n), weights)?;
        let tags = PolyRing::internal(ambient.field(), names, MonomialOrder::Grevlex, tag_weights)?;
        let ident: Vec<usize> = (0..n).collect();
        let gens = generators
            .iter()
            .enumerate()
            .map(|(i, s)| Ok(Polynomial::var(&full, n + i).sub(&s.map_vars(&full, &ident)?)))
            .collect::<Result<Vec<_>, GbError>>()?;
        let gb = buchberger(&Ideal::new(&full, gens)?, MonomialOrder::Elim(n), degree_cap)?;
        Ok(SubalgebraPresentation { ambient: ambient.clone(), generators: generators.to_vec(), full, tags, gb })
    }

    pub fn ambient(&self) -> &Ring {
        &self.ambient
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    /// `k[T_1,…,T_m]` with `deg T_i = deg s_i`.
    pub fn tag_ring(&self) -> &Ring {
        &self.tags
    }

    pub fn groebner_basis(&self) -> &GroebnerBasis {
        &self.gb
    }

    fn x_mask(&self) -> u32 {
        (1u32 << self.ambient.nvars()) - 1
    }

    fn to_tags(&self, p: &Polynomial) -> Result<Polynomial, GbError> {
        let n = self.ambient.nvars();
        let map: Vec<usize> = (0..self.full.nvars()).map(|i| i.saturating_sub(n)).collect();
        Ok(p.map_vars(&self.tags, &map)?)
    }

    /// Generators of the relation ideal `ker(k[T] → k[x])`: the basis
    /// elements free of `x`.
    pub fn relations(&self) -> Result<Vec<Polynomial>, GbError> {
        self.gb
            .basis()
            .filter(|g| g.support_mask() & self.x_mask() == 0)
            .map(|g| self.to_tags(g))
            .collect()
    }

    /// A polynomial `P(T)` with `P(s) = f`, or `None` if `f` is outside the subalgebra.
    pub fn express(&self, f: &Polynomial) -> Result<Option<Polynomial>, GbError> {
        if !crate::mpoly::same_ring(f.ring(), &self.ambient) {
            return Err(GbError::RingMismatch);
        }
        let ident: Vec<usize> = (0..self.ambient.nvars()).collect();
        let nf = self.gb.normal_form(&f.map_vars(&self.full, &ident)?)?;
        if nf.support_mask() & self.x_mask() != 0 {
            return Ok(None);
        }
        Ok(Some(self.to_tags(&nf)?))
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool, GbError> {
        Ok(self.express(f)?.is_some())
    }
}
