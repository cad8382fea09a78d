use crate::mpoly::Monomial;
use crate::tpoly::IntPoly;

/// Removes duplicates and multiples of other generators.
fn minimalize(mut gens: Vec<Monomial>) -> Vec<Monomial> {
    gens.sort_by_key(|m| m.total_degree());
    gens.dedup();
    let mut out: Vec<Monomial> = Vec::with_capacity(gens.len());
    for g in gens {
        if !out.iter().any(|m| m.divides(&g)) {
            out.push(g);
        }
    }
    out
}

/// Numerator `N(t)` of the Hilbert series `N(t) / Π_v (1 - t^{w_v})` of
/// `k[x]/(gens)`, for a monomial ideal with the given variable weights.
pub fn hilbert_numerator(gens: &[Monomial], weights: &[u32]) -> IntPoly {
    numerator(minimalize(gens.to_vec()), weights)
}

fn numerator(gens: Vec<Monomial>, weights: &[u32]) -> IntPoly {
    if gens.is_empty() {
        return IntPoly::one();
    }
    if gens.iter().any(Monomial::is_one) {
        return IntPoly::zero();
    }
    let pairwise_coprime = gens
        .iter()
        .enumerate()
        .all(|(i, a)| gens[i + 1..].iter().all(|b| a.is_coprime(b)));
    if pairwise_coprime {
        return gens
            .iter()
            .fold(IntPoly::one(), |acc, m| acc.mul(&IntPoly::one_minus_t_pow(m.weighted_degree(weights))));
    }
    // Pivot on the variable occurring in the most generators, at its smallest
    // positive exponent: N(M) = N(M + (p)) + t^{deg p} N(M : p).
    let n = weights.len();
    let var = (0..n)
        .max_by_key(|&i| (gens.iter().filter(|m| m.exp(i) > 0).count(), std::cmp::Reverse(i)))
        .expect("nonempty ring");
    let e = gens.iter().map(|m| m.exp(var)).filter(|&x| x > 0).min().expect("variable occurs");
    let pivot = Monomial::var(var, e);
    let mut with_pivot: Vec<Monomial> = gens.iter().filter(|m| !pivot.divides(m)).copied().collect();
    with_pivot.push(pivot);
    let colon: Vec<Monomial> = gens
        .iter()
        .map(|m| {
            let mut q = *m;
            q.set(var, m.exp(var).saturating_sub(e));
            q
        })
        .collect();
    let a = numerator(minimalize(with_pivot), weights);
    let b = numerator(minimalize(colon), weights);
    a.add(&b.shift(pivot.weighted_degree(weights)))
}
