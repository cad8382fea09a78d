//! Buchberger's algorithm with the Gebauer–Möller criteria and sugar selection.

use std::cmp::Ordering;

use super::{GbError, GbStats};
use crate::mpoly::{Monomial, Polynomial, Ring};

/// A basis polynomial with cached leading data. Polynomials are monic.
pub(crate) struct Reducer {
    pub poly: Polynomial,
    pub lm: Monomial,
    pub mask: u32,
}

impl Reducer {
    pub fn new(poly: Polynomial) -> Self {
        let lm = *poly.leading_monomial().expect("nonzero reducer");
        Reducer { mask: lm.support_mask(), poly, lm }
    }
}

/// `a - c·m·b` on sorted term slices.
fn sub_mul(ring: &Ring, a: &[(Monomial, u32)], c: u32, m: &Monomial, b: &[(Monomial, u32)]) -> Vec<(Monomial, u32)> {
    let f = ring.field();
    let nc = f.neg(c);
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let bm = b[j].0.mul(m);
        match ring.cmp(&a[i].0, &bm) {
            Ordering::Greater => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Less => {
                out.push((bm, f.mul(nc, b[j].1)));
                j += 1;
            }
            Ordering::Equal => {
                let v = f.add(a[i].1, f.mul(nc, b[j].1));
                if v != 0 {
                    out.push((bm, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend(b[j..].iter().map(|&(bm, bc)| (bm.mul(m), f.mul(nc, bc))));
    out
}

/// Full reduction of `f` by the reducers selected by `usable`. Returns the
/// remainder and the sugar bound accumulated along the way.
pub(crate) fn reduce_with(ring: &Ring, f: &Polynomial, mut sugar: u32, reducers: &[(&Reducer, u32)]) -> (Polynomial, u32) {
    let mut work: Vec<(Monomial, u32)> = f.terms().to_vec();
    let mut cursor = 0;
    let mut done: Vec<(Monomial, u32)> = Vec::new();
    while cursor < work.len() {
        let (m, c) = work[cursor];
        let mmask = m.support_mask();
        let found = reducers.iter().find(|(r, _)| r.mask & !mmask == 0 && r.lm.divides(&m));
        match found {
            Some(&(r, rsugar)) => {
                let q = m.div(&r.lm).expect("divisible");
                sugar = sugar.max(ring.degree_of(&q) + rsugar);
                // Reducers are monic, so the coefficient is `c` itself.
                work = sub_mul(ring, &work[cursor..], c, &q, r.poly.terms());
                cursor = 0;
            }
            None => {
                done.push((m, c));
                cursor += 1;
            }
        }
    }
    (Polynomial::from_sorted(ring, done), sugar)
}

#[derive(Clone, Copy)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

struct Engine<'r> {
    ring: &'r Ring,
    reducers: Vec<Reducer>,
    sugar: Vec<u32>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
    stats: GbStats,
}

impl<'r> Engine<'r> {
    fn reduce(&self, f: &Polynomial, sugar: u32) -> (Polynomial, u32) {
        let usable: Vec<(&Reducer, u32)> = (0..self.reducers.len())
            .filter(|&k| self.active[k])
            .map(|k| (&self.reducers[k], self.sugar[k]))
            .collect();
        reduce_with(self.ring, f, sugar, &usable)
    }

    fn pair_sugar(&self, i: usize, j: usize, lcm: &Monomial) -> u32 {
        let d = self.ring.degree_of(lcm);
        let si = self.sugar[i] + d - self.ring.degree_of(&self.reducers[i].lm);
        let sj = self.sugar[j] + d - self.ring.degree_of(&self.reducers[j].lm);
        si.max(sj)
    }

    /// Gebauer–Möller update for the new basis element `h`.
    fn update(&mut self, h: usize) {
        let lm_h = self.reducers[h].lm;
        let candidates: Vec<(usize, Monomial)> = (0..h)
            .filter(|&g| self.active[g])
            .map(|g| (g, lm_h.lcm(&self.reducers[g].lm)))
            .collect();
        // Chain criterion among the new pairs.
        let mut kept: Vec<(usize, Monomial)> = Vec::new();
        for (idx, &(g, lcm)) in candidates.iter().enumerate() {
            let coprime = lm_h.is_coprime(&self.reducers[g].lm);
            let dominated = candidates[idx + 1..].iter().any(|(_, l2)| l2.divides(&lcm))
                || kept.iter().any(|(_, l2)| l2.divides(&lcm));
            if coprime || !dominated {
                kept.push((g, lcm));
            }
        }
        // Product criterion.
        let fresh: Vec<(usize, Monomial)> =
            kept.into_iter().filter(|&(g, _)| !lm_h.is_coprime(&self.reducers[g].lm)).collect();
        // Old pairs made redundant by h.
        let before = self.pairs.len();
        let reducers = &self.reducers;
        self.pairs.retain(|p| {
            !(lm_h.divides(&p.lcm)
                && lm_h.lcm(&reducers[p.i].lm) != p.lcm
                && lm_h.lcm(&reducers[p.j].lm) != p.lcm)
        });
        self.stats.pairs_discarded += before - self.pairs.len();
        for (g, lcm) in fresh {
            let sugar = self.pair_sugar(g, h, &lcm);
            self.pairs.push(Pair { i: g, j: h, lcm, sugar });
        }
        for g in 0..h {
            if self.active[g] && lm_h.divides(&self.reducers[g].lm) {
                self.active[g] = false;
            }
        }
    }

    fn insert(&mut self, h: Polynomial, sugar: u32) -> usize {
        let idx = self.reducers.len();
        self.reducers.push(Reducer::new(h.monic()));
        self.sugar.push(sugar);
        self.active.push(true);
        self.update(idx);
        idx
    }

    fn select(&mut self) -> Option<Pair> {
        let ring = self.ring;
        let best = (0..self.pairs.len()).min_by(|&a, &b| {
            let (pa, pb) = (&self.pairs[a], &self.pairs[b]);
            pa.sugar
                .cmp(&pb.sugar)
                .then_with(|| ring.cmp(&pa.lcm, &pb.lcm))
                .then_with(|| (pa.i, pa.j).cmp(&(pb.i, pb.j)))
        })?;
        Some(self.pairs.swap_remove(best))
    }

    fn spoly(&self, p: &Pair) -> Polynomial {
        let (ri, rj) = (&self.reducers[p.i], &self.reducers[p.j]);
        let mi = p.lcm.div(&ri.lm).expect("lcm");
        let mj = p.lcm.div(&rj.lm).expect("lcm");
        let a = ri.poly.mul_term(&mi, 1);
        let terms = sub_mul(self.ring, a.terms(), 1, &mj, rj.poly.terms());
        Polynomial::from_sorted(self.ring, terms)
    }
}

/// Outcome of a Buchberger run: the reduced basis (monic, sorted by
/// descending leading monomial) or, for the unit ideal, `[1]`.
pub(crate) fn run(ring: &Ring, gens: &[Polynomial], cap: u32) -> Result<(Vec<Polynomial>, GbStats), GbError> {
    let mut engine = Engine {
        ring,
        reducers: Vec::new(),
        sugar: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
        stats: GbStats::default(),
    };
    let unit = |stats: GbStats| Ok((vec![Polynomial::one(ring)], stats));
    let mut inputs: Vec<&Polynomial> = gens.iter().filter(|g| !g.is_zero()).collect();
    inputs.sort_by_key(|g| g.degree().unwrap_or(0));
    for g in inputs {
        let s = g.degree().unwrap_or(0);
        let (h, s) = engine.reduce(g, s);
        if h.is_zero() {
            continue;
        }
        if h.is_constant() {
            return unit(engine.stats);
        }
        engine.insert(h, s);
    }
    while let Some(pair) = engine.select() {
        if pair.sugar > cap {
            engine.stats.max_sugar = engine.stats.max_sugar.max(pair.sugar);
            return Err(GbError::DegreeCapExceeded {
                cap,
                degree: pair.sugar,
                partial_basis_size: engine.active.iter().filter(|&&a| a).count(),
                stats: engine.stats,
            });
        }
        engine.stats.pairs_processed += 1;
        engine.stats.max_sugar = engine.stats.max_sugar.max(pair.sugar);
        let s = engine.spoly(&pair);
        let (h, sugar) = engine.reduce(&s, pair.sugar);
        if h.is_zero() {
            engine.stats.zero_reductions += 1;
            continue;
        }
        if h.is_constant() {
            return unit(engine.stats);
        }
        engine.insert(h, sugar);
    }
    Ok((interreduce(ring, &engine), engine.stats))
}

fn interreduce(ring: &Ring, engine: &Engine<'_>) -> Vec<Polynomial> {
    let mut basis: Vec<&Reducer> = (0..engine.reducers.len())
        .filter(|&k| engine.active[k])
        .map(|k| &engine.reducers[k])
        .collect();
    basis.sort_by(|a, b| ring.cmp(&b.lm, &a.lm));
    let mut out = Vec::with_capacity(basis.len());
    for (k, r) in basis.iter().enumerate() {
        let (lead, tail) = r.poly.terms().split_first().expect("nonzero");
        let tail = Polynomial::from_sorted(ring, tail.to_vec());
        let others: Vec<(&Reducer, u32)> =
            basis.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &r)| (r, 0)).collect();
        let (tail_nf, _) = reduce_with(ring, &tail, 0, &others);
        let mut terms = vec![*lead];
        terms.extend_from_slice(tail_nf.terms());
        out.push(Polynomial::from_sorted(ring, terms));
    }
    out
}
