//! Clustering scores by enumeration and direct counting.

use std::collections::BTreeMap;

fn ids(l: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = l.to_vec();
    v.sort();
    v.dedup();
    v
}

/// Best hit count over every injective map from predicted ids to true ids
/// (or the reverse when there are more predicted ids).
pub fn accuracy(t: &[usize], l: &[usize]) -> f64 {
    let (tid, lid) = (ids(t), ids(l));
    let mut best = 0usize;
    // Assign each predicted id a distinct true id or nothing.
    fn search(
        k: usize,
        lid: &[usize],
        tid: &[usize],
        used: &mut Vec<bool>,
        map: &mut BTreeMap<usize, usize>,
        t: &[usize],
        l: &[usize],
        best: &mut usize,
    ) {
        if k == lid.len() {
            let hits = t.iter().zip(l).filter(|(a, b)| map.get(b) == Some(a)).count();
            *best = (*best).max(hits);
            return;
        }
        search(k + 1, lid, tid, used, map, t, l, best);
        for (u, &target) in tid.iter().enumerate() {
            if !used[u] {
                used[u] = true;
                map.insert(lid[k], target);
                search(k + 1, lid, tid, used, map, t, l, best);
                map.remove(&lid[k]);
                used[u] = false;
            }
        }
    }
    search(
        0,
        &lid,
        &tid,
        &mut vec![false; tid.len()],
        &mut BTreeMap::new(),
        t,
        l,
        &mut best,
    );
    best as f64 / t.len() as f64
}

/// `(n11, n00, n01, n10)` by visiting every pair.
pub fn pair_counts(t: &[usize], l: &[usize]) -> (u64, u64, u64, u64) {
    let (mut n11, mut n00, mut n01, mut n10) = (0, 0, 0, 0);
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            match (t[i] == t[j], l[i] == l[j]) {
                (true, true) => n11 += 1,
                (false, false) => n00 += 1,
                (true, false) => n01 += 1,
                (false, true) => n10 += 1,
            }
        }
    }
    (n11, n00, n01, n10)
}

/// The pair-counting formula evaluated in floating point.
pub fn ari(t: &[usize], l: &[usize]) -> f64 {
    let (n11, n00, n01, n10) = pair_counts(t, l);
    let (n11, n00, n01, n10) = (n11 as f64, n00 as f64, n01 as f64, n10 as f64);
    let den = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
    if den == 0.0 {
        return if n01 == 0.0 && n10 == 0.0 { 1.0 } else { 0.0 };
    }
    2.0 * (n00 * n11 - n01 * n10) / den
}

/// Mutual information over max entropy from joint and marginal
/// frequencies.
pub fn nmi(t: &[usize], l: &[usize]) -> f64 {
    let n = t.len() as f64;
    let mut joint: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut pt: BTreeMap<usize, f64> = BTreeMap::new();
    let mut pl: BTreeMap<usize, f64> = BTreeMap::new();
    for (&a, &b) in t.iter().zip(l) {
        *joint.entry((a, b)).or_default() += 1.0 / n;
        *pt.entry(a).or_default() += 1.0 / n;
        *pl.entry(b).or_default() += 1.0 / n;
    }
    let h = |m: &BTreeMap<usize, f64>| -m.values().map(|p| p * p.ln()).sum::<f64>();
    let (ht, hl) = (h(&pt), h(&pl));
    if pt.len() == 1 && pl.len() == 1 {
        return 1.0;
    }
    if pt.len() == 1 || pl.len() == 1 {
        return 0.0;
    }
    let mi: f64 = joint.iter().map(|(&(a, b), &p)| p * (p / (pt[&a] * pl[&b])).ln()).sum();
    mi / ht.max(hl)
}
