use alloc::vec::Vec;

use super::{generate, Candidate, Context, Stream};
use crate::eval;
use crate::phi::{Mode, Phi};
use crate::program::Program;

/// Projections built from the per-column matches of the output against the child.
///
/// Requires a positional `phi`; every yielded projection satisfies it. Column
/// lists naming a child column twice are skipped, so the yielded set is exactly
/// the baseline's survivors.
pub fn fast_projections<'c>(ctx: &'c Context<'_>, cand: Candidate, phi: Phi) -> Stream<'c> {
    let Phi::Rel(Mode::Positional, rel) = phi else {
        return super::project::baseline_projections(ctx, cand, phi);
    };
    let matches = ctx.out.matches(&cand.table, rel);
    if matches.is_empty() || matches.iter().any(Vec::is_empty) {
        return alloc::boxed::Box::new(core::iter::empty());
    }
    let cap = ctx.config.max_projection_combos as u64;
    let mut digits: Option<Vec<usize>> = None;
    let mut produced = 0u64;
    generate(ctx, move || {
        if produced >= cap {
            return None;
        }
        match digits.as_mut() {
            None => digits = Some(alloc::vec![0; matches.len()]),
            Some(d) => {
                if !odometer(d, &matches) {
                    return None;
                }
            }
        }
        produced += 1;
        ctx.bump(|c| c.projection_combos += 1);
        let cols: Vec<usize> = digits.as_ref()?.iter().zip(&matches).map(|(&d, m)| m[d]).collect();
        if (1..cols.len()).any(|i| cols[..i].contains(&cols[i])) {
            return Some(None);
        }
        let table = eval::project(&cand.table, &cols).ok()?;
        ctx.bump(|c| c.candidates += 1);
        Some(Some(Candidate::new(Program::Project { child: cand.program.clone(), cols }, table)))
    })
}

/// Advances a mixed-radix counter, rightmost digit fastest. False once it wraps.
fn odometer(d: &mut [usize], radix: &[Vec<usize>]) -> bool {
    for i in (0..d.len()).rev() {
        d[i] += 1;
        if d[i] < radix[i].len() {
            return true;
        }
        d[i] = 0;
    }
    false
}

/// Every non-empty ordered selection of the child's columns that satisfies `phi`.
///
/// Subsets are visited by increasing size, lexicographically within a size,
/// and each subset in lexicographic permutation order. Stops after
/// `max_projection_combos` column lists.
pub fn baseline_projections<'c>(ctx: &'c Context<'_>, cand: Candidate, phi: Phi) -> Stream<'c> {
    let n = cand.table.width();
    let cap = ctx.config.max_projection_combos as u64;
    let mut tried = 0u64;
    let mut comb: Vec<usize> = Vec::new();
    let mut perm: Vec<usize> = Vec::new();
    generate(ctx, move || {
        if tried >= cap {
            return None;
        }
        tried += 1;
        if perm.is_empty() {
            if n == 0 {
                return None;
            }
            comb.push(0);
            perm.clone_from(&comb);
        } else if !next_permutation(&mut perm) {
            if !next_combination(&mut comb, n) {
                let k = comb.len() + 1;
                if k > n {
                    return None;
                }
                comb = (0..k).collect();
            }
            perm.clone_from(&comb);
        }
        ctx.bump(|c| c.projection_combos += 1);
        let table = eval::project(&cand.table, &perm).ok()?;
        Some(ctx.keep(phi, Program::Project { child: cand.program.clone(), cols: perm.clone() }, table))
    })
}

/// Next k-subset of `0..n` in lexicographic order.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("pivot has a successor");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
