//! Fill-reducing ordering by minimum degree on a quotient graph.
//!
//! Variables with identical closed adjacency are merged into weighted
//! supervariables before elimination, which matters for stochastic Galerkin
//! matrices where every grid point carries a full set of chaos coefficients.
//! Degrees are the approximate external degrees of Amestoy, Davis and Duff.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

const NONE: usize = usize::MAX;

/// Minimum degree order for the symmetric pattern given as adjacency lists.
///
/// `adj[v]` lists the neighbours of `v`; self loops and duplicates are
/// ignored and the pattern is symmetrized. Returns `perm` with `perm[k]` the
/// variable eliminated at step `k`.
pub fn minimum_degree(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n == 0 {
        return Vec::new();
    }
    let sym = symmetrize(adj);
    let (rep, members) = compress(&sym);
    let nc = members.len();
    let mut cadj: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for (c, mem) in members.iter().enumerate() {
        let mut list: Vec<usize> = sym[mem[0]].iter().map(|&u| rep[u]).filter(|&u| u != c).collect();
        list.sort_unstable();
        list.dedup();
        cadj[c] = list;
    }
    let weights: Vec<usize> = members.iter().map(Vec::len).collect();
    let order = QuotientGraph::new(cadj, weights).eliminate();
    order.into_iter().flat_map(|c| members[c].iter().copied()).collect()
}

fn symmetrize(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, list) in adj.iter().enumerate() {
        for &u in list {
            if u != v && u < n {
                out[v].push(u);
                out[u].push(v);
            }
        }
    }
    for list in &mut out {
        list.sort_unstable();
        list.dedup();
    }
    out
}

/// Groups variables whose closed neighbourhoods coincide.
fn compress(sym: &[Vec<usize>]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = sym.len();
    let hash = |v: usize| -> u64 {
        let mut h = v as u64;
        for &u in &sym[v] {
            h = h.wrapping_add(u as u64);
        }
        h.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ sym[v].len() as u64
    };
    let mut buckets: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        buckets.entry(hash(v)).or_default().push(v);
    }
    let closed = |v: usize| -> Vec<usize> {
        let mut c = sym[v].clone();
        let pos = c.binary_search(&v).unwrap_err();
        c.insert(pos, v);
        c
    };
    let mut rep = vec![NONE; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        if rep[v] != NONE {
            continue;
        }
        let id = members.len();
        rep[v] = id;
        let mut group = vec![v];
        let cv = closed(v);
        for &u in &buckets[&hash(v)] {
            if u > v && rep[u] == NONE && sym[u].len() == sym[v].len() && closed(u) == cv {
                rep[u] = id;
                group.push(u);
            }
        }
        members.push(group);
    }
    (rep, members)
}

struct QuotientGraph {
    n: usize,
    weight: Vec<usize>,
    /// variable-variable adjacency not yet covered by an element
    vadj: Vec<Vec<usize>>,
    /// elements adjacent to a variable
    eadj: Vec<Vec<usize>>,
    /// variables of an element
    elem: Vec<Vec<usize>>,
    eliminated: Vec<bool>,
    absorbed: Vec<bool>,
    degree: Vec<usize>,
    head: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
}

impl QuotientGraph {
    fn new(vadj: Vec<Vec<usize>>, weight: Vec<usize>) -> Self {
        let n = vadj.len();
        let total: usize = weight.iter().sum();
        let degree: Vec<usize> = vadj.iter().map(|l| l.iter().map(|&u| weight[u]).sum()).collect();
        let mut g = Self {
            n,
            weight,
            vadj,
            eadj: vec![Vec::new(); n],
            elem: vec![Vec::new(); n],
            eliminated: vec![false; n],
            absorbed: vec![false; n],
            degree,
            head: vec![NONE; total + 1],
            next: vec![NONE; n],
            prev: vec![NONE; n],
        };
        for v in 0..n {
            g.insert(v);
        }
        g
    }

    fn insert(&mut self, v: usize) {
        let d = self.degree[v];
        self.prev[v] = NONE;
        self.next[v] = self.head[d];
        if self.head[d] != NONE {
            self.prev[self.head[d]] = v;
        }
        self.head[d] = v;
    }

    fn remove(&mut self, v: usize) {
        let d = self.degree[v];
        if self.prev[v] != NONE {
            self.next[self.prev[v]] = self.next[v];
        } else {
            self.head[d] = self.next[v];
        }
        if self.next[v] != NONE {
            self.prev[self.next[v]] = self.prev[v];
        }
    }

    fn eliminate(mut self) -> Vec<usize> {
        let n = self.n;
        let total: usize = self.weight.iter().sum();
        let mut order = Vec::with_capacity(n);
        let mut in_lp = vec![false; n];
        // |Le \ Lp| scratch, NONE when untouched in this step
        let mut ext = vec![NONE; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut mindeg = 0;
        let mut remaining = total;
        while order.len() < n {
            while self.head[mindeg] == NONE {
                mindeg += 1;
            }
            let p = self.head[mindeg];
            self.remove(p);
            order.push(p);
            self.eliminated[p] = true;
            remaining -= self.weight[p];

            // Lp = Ap ∪ (∪ Le for e ∈ Ep), minus p and eliminated variables
            let mut lp: Vec<usize> = Vec::new();
            in_lp[p] = true;
            for &u in &self.vadj[p] {
                if !self.eliminated[u] && !in_lp[u] {
                    in_lp[u] = true;
                    lp.push(u);
                }
            }
            let ep = core::mem::take(&mut self.eadj[p]);
            for &e in &ep {
                if self.absorbed[e] {
                    continue;
                }
                for &u in &self.elem[e] {
                    if !self.eliminated[u] && !in_lp[u] {
                        in_lp[u] = true;
                        lp.push(u);
                    }
                }
                self.absorbed[e] = true;
                self.elem[e] = Vec::new();
            }
            self.vadj[p] = Vec::new();
            let lp_weight: usize = lp.iter().map(|&u| self.weight[u]).sum();

            // external sizes |Le \ Lp| of elements touching Lp
            for &v in &lp {
                for &e in &self.eadj[v] {
                    if self.absorbed[e] || e == p {
                        continue;
                    }
                    if ext[e] == NONE {
                        ext[e] = self.elem[e].iter().filter(|&&u| !self.eliminated[u]).map(|&u| self.weight[u]).sum();
                        touched.push(e);
                    }
                    ext[e] -= self.weight[v];
                }
            }
            // aggressive absorption of elements contained in Lp
            for &e in &touched {
                if ext[e] == 0 {
                    self.absorbed[e] = true;
                    self.elem[e] = Vec::new();
                }
            }

            for &v in &lp {
                self.remove(v);
                let (absorbed, eliminated) = (&self.absorbed, &self.eliminated);
                let eadj = &mut self.eadj[v];
                eadj.retain(|&e| !absorbed[e]);
                eadj.push(p);
                self.vadj[v].retain(|&u| !eliminated[u] && !in_lp[u]);
                let mut d = lp_weight - self.weight[v];
                for &e in &self.eadj[v] {
                    if e != p {
                        d += ext[e];
                    }
                }
                for &u in &self.vadj[v] {
                    d += self.weight[u];
                }
                self.degree[v] = d.min(remaining - self.weight[v]);
                self.insert(v);
                mindeg = mindeg.min(self.degree[v]);
            }
            for &e in &touched {
                ext[e] = NONE;
            }
            touched.clear();
            in_lp[p] = false;
            for &v in &lp {
                in_lp[v] = false;
            }
            self.elem[p] = lp;
        }
        order
    }
}
