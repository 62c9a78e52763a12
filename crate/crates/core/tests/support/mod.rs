//! Shared test support: an independent brute-force homology oracle and a
//! generator of random bounded S1-complexes.
#![allow(dead_code)] // each test binary uses a different subset
//!
//! The oracle shares no code with the engine: dense rational elimination
//! for ranks, a textbook first-nonzero-pivot Smith reduction for torsion.
//! Torsion of ker(d_out)/im(d_in) equals torsion of the full cokernel of
//! d_in because ker(d_out) is a direct summand (the quotient by it embeds
//! into a free module), so the oracle never needs a kernel basis.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use psh_core::graded::Generator;
use psh_core::presentation::AbelianGroupPresentation;
use psh_core::ring::{coeff_from_i64, Coeff};
use psh_core::s1::{complex_from_entries, S1Complex};
use psh_core::{ExactMatrix, Ring};
use rand::rngs::StdRng;
use rand::Rng;

/// Dense rational row reduction; returns the rank.
pub fn oracle_rank_q(mut grid: Vec<Vec<BigRational>>) -> usize {
    let rows = grid.len();
    let cols = grid.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !grid[r][c].is_zero()) else { continue };
        grid.swap(rank, p);
        let inv = grid[rank][c].clone().recip();
        for x in &mut grid[rank] {
            *x *= &inv;
        }
        for r in 0..rows {
            if r != rank && !grid[r][c].is_zero() {
                let f = grid[r][c].clone();
                for cc in 0..cols {
                    let t = &grid[rank][cc] * &f;
                    grid[r][cc] -= t;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub fn to_grid_q(m: &ExactMatrix) -> Vec<Vec<BigRational>> {
    m.to_dense()
}

/// Textbook Smith reduction with first-nonzero pivoting, no transforms.
/// Returns the nonzero diagonal entries (positive, divisibility chain).
pub fn oracle_snf_diagonal(m: &ExactMatrix) -> Vec<BigInt> {
    let rows = m.rows();
    let cols = m.cols();
    let mut g: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); cols]; rows];
    for (r, c, v) in m.iter() {
        g[r][c] = v.to_integer();
    }
    let mut t = 0;
    while t < rows.min(cols) {
        // first nonzero entry of the trailing block
        let mut pivot = None;
        'outer: for r in t..rows {
            for c in t..cols {
                if !g[r][c].is_zero() {
                    pivot = Some((r, c));
                    break 'outer;
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        g.swap(t, pr);
        for row in g.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let mut clean = true;
            for r in t + 1..rows {
                if g[r][t].is_zero() {
                    continue;
                }
                let q = &g[r][t] / &g[t][t];
                for c in t..cols {
                    let sub = &g[t][c] * &q;
                    g[r][c] -= sub;
                }
                if !g[r][t].is_zero() {
                    g.swap(t, r);
                    clean = false;
                }
            }
            for c in t + 1..cols {
                if g[t][c].is_zero() {
                    continue;
                }
                let q = &g[t][c] / &g[t][t];
                for r in t..rows {
                    let sub = &g[r][t] * &q;
                    g[r][c] -= sub;
                }
                if !g[t][c].is_zero() {
                    for row in g.iter_mut() {
                        row.swap(t, c);
                    }
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        // divisibility repair
        let mut ok = true;
        'scan: for r in t + 1..rows {
            for c in t + 1..cols {
                if !(&g[r][c] % &g[t][t]).is_zero() {
                    for cc in t..cols {
                        let add = g[r][cc].clone();
                        g[t][cc] += add;
                    }
                    ok = false;
                    break 'scan;
                }
            }
        }
        if ok {
            t += 1;
        }
    }
    (0..t).map(|i| g[i][i].abs()).collect()
}

/// Brute-force homology of a segment: rational rank-nullity for the free
/// rank, cokernel invariant factors of d_in for the torsion.
pub fn oracle_homology(d_in: &ExactMatrix, d_out: &ExactMatrix) -> AbelianGroupPresentation {
    let nullity = d_out.cols() - oracle_rank_q(to_grid_q(d_out));
    let rank_in = oracle_rank_q(to_grid_q(d_in));
    let torsion: Vec<BigInt> = oracle_snf_diagonal(d_in)
        .into_iter()
        .filter(|d| !d.is_one())
        .collect();
    AbelianGroupPresentation { free_rank: nullity - rank_in, invariant_factors: torsion }
}

/// A random bounded S1-complex built from strictly triangular data:
/// "source" generators map only to "target" generators, so every
/// composite delta_i delta_j vanishes identically and the structure
/// relation holds for any coefficients.
pub struct RandomComplex {
    pub complex: S1Complex,
    /// (order, source index, target index, coeff) of every entry.
    pub entries: Vec<(usize, usize, usize, i64)>,
    pub n_sources: usize,
}

pub fn random_bipartite_complex(rng: &mut StdRng, ring: Ring, max_order: usize) -> RandomComplex {
    let n_sources = rng.gen_range(2..=5);
    let d = rng.gen_range(0..=max_order);
    let mut gens: Vec<Generator> = Vec::new();
    for s in 0..n_sources {
        gens.push(Generator::new(format!("s{s}"), rng.gen_range(-4..=4)));
    }
    let mut entries: Vec<(usize, usize, usize, i64)> = Vec::new();
    let mut n_targets = 0;
    for s in 0..n_sources {
        for order in 0..=d {
            if rng.gen_bool(0.7) {
                let degree = gens[s].degree + 1 - 2 * order as i64;
                // reuse a matching target half the time
                let existing: Vec<usize> = (0..n_targets)
                    .filter(|&t| gens[n_sources + t].degree == degree)
                    .collect();
                let t = if !existing.is_empty() && rng.gen_bool(0.5) {
                    existing[rng.gen_range(0..existing.len())]
                } else {
                    gens.push(Generator::new(format!("t{n_targets}"), degree));
                    n_targets += 1;
                    n_targets - 1
                };
                let coeff = *[-3i64, -2, -1, 1, 2, 3].get(rng.gen_range(0..6)).unwrap();
                entries.push((order, s, t, coeff));
            }
        }
    }
    let named: Vec<(usize, String, String, Coeff)> = entries
        .iter()
        .map(|&(o, s, t, c)| (o, format!("s{s}"), format!("t{t}"), coeff_from_i64(c)))
        .collect();
    let refs: Vec<(usize, &str, &str, Coeff)> =
        named.iter().map(|(o, f, t, c)| (*o, f.as_str(), t.as_str(), c.clone())).collect();
    let complex = complex_from_entries(ring, gens, &refs).expect("bipartite data is always valid");
    RandomComplex { complex, entries, n_sources }
}

/// A single degree-consistent entry from a target back to a source that
/// provably breaks the structure relation: composed with the (nonzero)
/// matrix entry feeding that target, it contributes a source-to-source
/// term no other path can cancel. Returns `None` when the complex has no
/// usable entry, which callers treat as a resample.
pub fn breaking_perturbation(
    rng: &mut StdRng,
    rc: &RandomComplex,
    max_order: usize,
) -> Option<(usize, String, String, i64)> {
    let c = &rc.complex;
    let module = c.module();
    let mut candidates = Vec::new();
    for op in c.operations() {
        for (t_idx, s_idx, _) in op.iter() {
            if s_idx >= rc.n_sources || t_idx < rc.n_sources {
                continue;
            }
            let t_deg = module.degree(t_idx);
            for order in 0..=max_order {
                for s2 in 0..rc.n_sources {
                    if module.degree(s2) == t_deg + 1 - 2 * order as i64 {
                        candidates.push((order, t_idx, s2));
                    }
                }
            }
        }
    }
    if candidates.is_empty() {
        return None;
    }
    let (order, from, to) = candidates[rng.gen_range(0..candidates.len())];
    let coeff = if rng.gen_bool(0.5) { 1 } else { -1 };
    Some((
        order,
        module.generator(from).id.clone(),
        module.generator(to).id.clone(),
        coeff,
    ))
}

/// Applies a perturbation entry to a copy of the complex.
pub fn perturbed(c: &S1Complex, entry: &(usize, String, String, i64)) -> S1Complex {
    let (order, from, to, coeff) = entry;
    let module = c.module().clone();
    let depth = c.operations().len().max(order + 1);
    let mut ops: Vec<ExactMatrix> = (0..depth).map(|i| c.operation(i)).collect();
    let r = module.index_of(to).unwrap();
    let cc = module.index_of(from).unwrap();
    ops[*order].add_entry(r, cc, coeff_from_i64(*coeff)).unwrap();
    S1Complex::new(module, ops).expect("perturbation is degree-consistent")
}

/// Invariant factors (ascending divisibility chain) of a direct sum of
/// cyclic groups, synthesized from prime factorizations. Independent of
/// the engine's normalization path; orders are small test values.
pub fn invariant_factors_of_cyclic_sum(orders: &[u64]) -> Vec<BigInt> {
    use std::collections::BTreeMap;
    let mut table: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &o in orders {
        assert!(o >= 2, "cyclic order must be >= 2, got {o}");
        let mut n = o;
        let mut p = 2u64;
        while p * p <= n {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 0 {
                table.entry(p).or_default().push(e);
            }
            p += 1;
        }
        if n > 1 {
            table.entry(n).or_default().push(1);
        }
    }
    for exps in table.values_mut() {
        exps.sort_unstable_by(|a, b| b.cmp(a));
    }
    let depth = table.values().map(|v| v.len()).max().unwrap_or(0);
    let mut factors = Vec::new();
    for j in 0..depth {
        let mut f = 1u64;
        for (p, exps) in &table {
            if let Some(&e) = exps.get(j) {
                f *= p.pow(e);
            }
        }
        factors.push(BigInt::from(f));
    }
    factors.reverse();
    factors
}
