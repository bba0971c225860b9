//! Finds integer combinations of known zero expressions that add up to a
//! target expression.

use indexmap::IndexSet;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::relation::{DerivationTrace, RelationInstance};
use super::{SymbolExpr, SymbolTerm};
use crate::abelian::{BigRow, Lattice};

/// Searches for `target = sum_k c_k * replay(blocks[k])`, adding the
/// formal-triviality instances for any `{1,b}`, `{a,1}`, `<a,0>`, `<0,b>`
/// that occur. Returns the combined trace, re-verified by replay.
pub fn certify_with(target: &SymbolExpr, blocks: &[DerivationTrace]) -> Option<DerivationTrace> {
    if target.is_zero() {
        return Some(DerivationTrace::new());
    }
    let mut all: Vec<DerivationTrace> = blocks.to_vec();
    let mut index: IndexSet<SymbolTerm> = IndexSet::new();
    let mut rows: Vec<Vec<(usize, i64)>> = Vec::new();
    let mut trivial_done: IndexSet<SymbolTerm> = IndexSet::new();
    let mut scan = |e: &SymbolExpr, all: &mut Vec<DerivationTrace>| {
        for (t, _) in e.terms() {
            if t.is_trivial() && trivial_done.insert(t.clone()) {
                if let Some(tr) = RelationInstance::trivial_zero(t) {
                    all.push(tr);
                }
            }
        }
    };
    scan(target, &mut all);
    // Blocks appended by `scan` are processed in turn.
    let mut k = 0;
    while k < all.len() {
        let r = all[k].replay();
        scan(&r, &mut all);
        rows.push(register(&mut index, &r));
        k += 1;
    }
    let mut lattice = Lattice::new();
    for (i, r) in rows.iter().enumerate() {
        lattice.insert(i, r);
    }
    let tvec: BigRow = register(&mut index, target).into_iter().map(|(c, v)| (c, BigInt::from(v))).collect();
    let combo = lattice.solve(&tvec)?;
    let mut tr = DerivationTrace::new();
    for (i, c) in combo {
        tr.append_scaled(&all[i], c.to_i64()?);
    }
    tr.proves(target).then_some(tr)
}

fn register(index: &mut IndexSet<SymbolTerm>, e: &SymbolExpr) -> Vec<(usize, i64)> {
    let mut row: Vec<(usize, i64)> = e.terms().map(|(t, c)| (index.insert_full(t.clone()).0, c)).collect();
    row.sort_unstable();
    row
}

/// Uses `steps` directly when their replay already equals `target`, and
/// otherwise lets the solver recombine them.
pub fn certify_fixed(target: &SymbolExpr, steps: DerivationTrace) -> Option<DerivationTrace> {
    if steps.proves(target) {
        return Some(steps);
    }
    let blocks: Vec<DerivationTrace> =
        steps.steps().iter().map(|(_, i)| DerivationTrace::single(i.clone())).collect();
    certify_with(target, &blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingDescriptor;

    #[test]
    fn recombines_with_signs() {
        let r = RingDescriptor::prime_field(7).unwrap();
        let (a, b) = (r.from_int(3), r.from_int(5));
        // {3,5} is an S3 instance; {3,5*3=1} is trivial; so {3,3} = -{3,5} + 0.
        let blocks = vec![
            DerivationTrace::single(RelationInstance::s3(&a).unwrap()),
            DerivationTrace::single(RelationInstance::s1r(&a, &b, &a).unwrap()),
        ];
        let target = SymbolExpr::steinberg(&a, &a).unwrap();
        let tr = certify_with(&target, &blocks).unwrap();
        assert!(tr.proves(&target));
        assert!(certify_with(&SymbolExpr::steinberg(&a, &r.from_int(2)).unwrap(), &blocks).is_none());
    }
}
