//! Incremental bookkeeping for a partial key assignment.

use crate::instance::{KeyAssignment, KmpInstance};

/// Instance data in the shape the search loops want it.
pub(crate) struct Ctx<'a> {
    pub inst: &'a KmpInstance,
    pub n: usize,
    pub kc: usize,
    pub q: usize,
    /// Largest integer neighborhood use allowed at each vertex.
    pub nb_cap: Vec<u32>,
}

impl<'a> Ctx<'a> {
    pub fn new(inst: &'a KmpInstance) -> Self {
        let n = inst.vertex_count();
        Ctx {
            inst,
            n,
            kc: inst.key_count(),
            q: inst.q() as usize,
            nb_cap: (0..n).map(|i| inst.neighborhood_cap(i)).collect(),
        }
    }

    #[inline]
    pub fn cell(&self, i: usize, k: usize) -> usize {
        i * self.kc + k
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        self.inst.graph().neighbors(i)
    }
}

/// Key rings plus the running sums every constraint needs.
#[derive(Clone, Debug)]
pub(crate) struct Counts {
    pub ones: Vec<bool>,
    pub mem_used: Vec<u32>,
    pub usage: Vec<u32>,
    /// `nb_ones[i*kc + k]`: neighbors of i that hold k.
    pub nb_ones: Vec<u16>,
}

impl Counts {
    pub fn new(ctx: &Ctx) -> Self {
        Counts {
            ones: vec![false; ctx.n * ctx.kc],
            mem_used: vec![0; ctx.n],
            usage: vec![0; ctx.kc],
            nb_ones: vec![0; ctx.n * ctx.kc],
        }
    }

    #[inline]
    pub fn has(&self, ctx: &Ctx, i: usize, k: usize) -> bool {
        self.ones[ctx.cell(i, k)]
    }

    /// Whether key k can join ring(i) without breaking any constraint.
    pub fn can_add(&self, ctx: &Ctx, i: usize, k: usize) -> bool {
        let inst = ctx.inst;
        let c = ctx.cell(i, k);
        if self.ones[c]
            || self.mem_used[i] + inst.mem_per_key()[k] > inst.capacity()[i]
            || self.usage[k] >= inst.usage_limit()[k]
            || u32::from(self.nb_ones[c]) > ctx.nb_cap[i]
        {
            return false;
        }
        ctx.neighbors(i).iter().all(|&j| {
            let cj = ctx.cell(j, k);
            !self.ones[cj] || u32::from(self.nb_ones[cj]) < ctx.nb_cap[j]
        })
    }

    pub fn add(&mut self, ctx: &Ctx, i: usize, k: usize) {
        let c = ctx.cell(i, k);
        debug_assert!(!self.ones[c]);
        self.ones[c] = true;
        self.mem_used[i] += ctx.inst.mem_per_key()[k];
        self.usage[k] += 1;
        for &j in ctx.neighbors(i) {
            self.nb_ones[ctx.cell(j, k)] += 1;
        }
    }

    pub fn remove(&mut self, ctx: &Ctx, i: usize, k: usize) {
        let c = ctx.cell(i, k);
        debug_assert!(self.ones[c]);
        self.ones[c] = false;
        self.mem_used[i] -= ctx.inst.mem_per_key()[k];
        self.usage[k] -= 1;
        for &j in ctx.neighbors(i) {
            self.nb_ones[ctx.cell(j, k)] -= 1;
        }
    }

    pub fn shared(&self, ctx: &Ctx, i: usize, j: usize) -> usize {
        let (ri, rj) = (ctx.cell(i, 0), ctx.cell(j, 0));
        (0..ctx.kc)
            .filter(|&k| self.ones[ri + k] && self.ones[rj + k])
            .count()
    }

    /// Secure edges among the edges incident to i.
    pub fn secure_around(&self, ctx: &Ctx, i: usize) -> usize {
        ctx.neighbors(i)
            .iter()
            .filter(|&&j| self.shared(ctx, i, j) >= ctx.q)
            .count()
    }

    pub fn to_assignment(&self, ctx: &Ctx) -> KeyAssignment {
        let mut a = KeyAssignment::empty(ctx.n, ctx.kc);
        for i in 0..ctx.n {
            for k in 0..ctx.kc {
                if self.has(ctx, i, k) {
                    a.set(i, k, true);
                }
            }
        }
        a
    }
}
