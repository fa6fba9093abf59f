//! Exhaustive searches for tiling complements and spectra.

use serde::Serialize;

use super::{dft_zero_set, DualZeroSet, GroupSubset, ProductGroup};
use crate::error::{Error, Result};

/// Sets found by a search, sorted; `exhaustive` is false when the node budget ran out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub sets: Vec<GroupSubset>,
    pub exhaustive: bool,
    pub reason: Option<String>,
    pub nodes: u64,
}

struct Budget {
    limit: Option<u64>,
    used: u64,
}

impl Budget {
    /// `false` once the limit is hit.
    fn tick(&mut self) -> bool {
        self.used += 1;
        self.limit.is_none_or(|l| self.used <= l)
    }
}

struct Tiler<'a> {
    g: ProductGroup,
    shape: &'a [(u64, u64)],
    covered: Vec<bool>,
    n_covered: usize,
    chosen: Vec<(u64, u64)>,
    found: Vec<Vec<(u64, u64)>>,
    first_only: bool,
    budget: Budget,
    aborted: bool,
}

impl Tiler<'_> {
    fn try_place(&mut self, t: (u64, u64)) -> bool {
        let fits = self.shape.iter().all(|&a| !self.covered[self.g.index(self.g.add(a, t))]);
        if fits {
            for &a in self.shape {
                self.covered[self.g.index(self.g.add(a, t))] = true;
            }
            self.n_covered += self.shape.len();
            self.chosen.push(t);
        }
        fits
    }

    fn remove(&mut self, t: (u64, u64)) {
        for &a in self.shape {
            self.covered[self.g.index(self.g.add(a, t))] = false;
        }
        self.n_covered -= self.shape.len();
        self.chosen.pop();
    }

    fn done(&self) -> bool {
        self.aborted || (self.first_only && !self.found.is_empty())
    }

    /// Covers the smallest uncovered element by every possible translate.
    fn run(&mut self, cursor: usize) {
        if self.n_covered == self.covered.len() {
            self.found.push(self.chosen.clone());
            return;
        }
        let mut idx = cursor;
        while self.covered[idx] {
            idx += 1;
        }
        let target = self.g.element(idx);
        for i in 0..self.shape.len() {
            if self.done() {
                return;
            }
            if !self.budget.tick() {
                self.aborted = true;
                return;
            }
            let t = self.g.sub(target, self.shape[i]);
            if self.try_place(t) {
                self.run(idx + 1);
                self.remove(t);
            }
        }
    }
}

fn tiling_search(a: &GroupSubset, budget: Option<u64>, first_only: bool) -> Result<SearchOutcome> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let g = a.group();
    if g.order() % a.len() as u64 != 0 {
        return Ok(SearchOutcome {
            sets: Vec::new(),
            exhaustive: true,
            reason: Some(format!("#A = {} does not divide the group order {}", a.len(), g.order())),
            nodes: 0,
        });
    }
    let mut tiler = Tiler {
        g,
        shape: a.elements(),
        covered: vec![false; g.order() as usize],
        n_covered: 0,
        chosen: Vec::new(),
        found: Vec::new(),
        first_only,
        budget: Budget { limit: budget, used: 0 },
        aborted: false,
    };
    tiler.try_place((0, 0));
    tiler.run(0);
    let mut sets: Vec<GroupSubset> = tiler
        .found
        .into_iter()
        .map(|t| GroupSubset::new(g, t).expect("translates are distinct"))
        .collect();
    sets.sort();
    let reason = tiler.aborted.then(|| format!("node budget {} exhausted", budget.unwrap_or(0)));
    Ok(SearchOutcome { sets, exhaustive: !tiler.aborted, reason, nodes: tiler.budget.used })
}

/// All `T ∋ 0` with `A ⊕ T` equal to the group, in lexicographic order.
pub fn find_tiling_complements(a: &GroupSubset) -> Result<SearchOutcome> {
    tiling_search(a, None, false)
}

pub fn find_tiling_complements_with_budget(a: &GroupSubset, budget: Option<u64>) -> Result<SearchOutcome> {
    tiling_search(a, budget, false)
}

/// Whether some complement exists; stops at the first one.
pub fn is_tile(a: &GroupSubset) -> Result<bool> {
    Ok(!tiling_search(a, None, true)?.sets.is_empty())
}

struct CliqueSearch<'a> {
    g: ProductGroup,
    zeros: &'a DualZeroSet,
    candidates: Vec<(u64, u64)>,
    adjacent: Vec<Vec<bool>>,
    need: usize,
    chosen: Vec<usize>,
    found: Vec<Vec<usize>>,
    first_only: bool,
    budget: Budget,
    aborted: bool,
}

impl CliqueSearch<'_> {
    fn run(&mut self, start: usize) {
        if self.chosen.len() == self.need {
            self.found.push(self.chosen.clone());
            return;
        }
        let remaining = self.need - self.chosen.len();
        for c in start..self.candidates.len() {
            if self.aborted || (self.first_only && !self.found.is_empty()) {
                return;
            }
            if self.candidates.len() - c < remaining {
                return;
            }
            if !self.budget.tick() {
                self.aborted = true;
                return;
            }
            if self.chosen.iter().all(|&d| self.adjacent[d][c]) {
                self.chosen.push(c);
                self.run(c + 1);
                self.chosen.pop();
            }
        }
    }
}

fn spectrum_search(a: &GroupSubset, budget: Option<u64>, first_only: bool) -> Result<SearchOutcome> {
    let zeros = dft_zero_set(a)?;
    let g = a.group();
    let candidates: Vec<(u64, u64)> = zeros.zeros().iter().copied().collect();
    let adjacent = candidates
        .iter()
        .map(|&x| candidates.iter().map(|&y| zeros.contains_index(g.index(g.sub(x, y)))).collect())
        .collect();
    let mut search = CliqueSearch {
        g,
        zeros: &zeros,
        candidates,
        adjacent,
        need: a.len() - 1,
        chosen: Vec::new(),
        found: Vec::new(),
        first_only,
        budget: Budget { limit: budget, used: 0 },
        aborted: false,
    };
    search.run(0);
    debug_assert!(search.zeros.group() == search.g);
    let mut sets: Vec<GroupSubset> = search
        .found
        .iter()
        .map(|clique| {
            let members = std::iter::once((0, 0)).chain(clique.iter().map(|&c| search.candidates[c]));
            GroupSubset::new(g, members).expect("zero set excludes the identity")
        })
        .collect();
    sets.sort();
    let reason = search.aborted.then(|| format!("node budget {} exhausted", budget.unwrap_or(0)));
    Ok(SearchOutcome { sets, exhaustive: !search.aborted, reason, nodes: search.budget.used })
}

/// All spectra `L ∋ 0`: `#L = #A` with pairwise differences in `Z_A`.
pub fn find_spectra(a: &GroupSubset) -> Result<SearchOutcome> {
    spectrum_search(a, None, false)
}

pub fn find_spectra_with_budget(a: &GroupSubset, budget: Option<u64>) -> Result<SearchOutcome> {
    spectrum_search(a, budget, false)
}

/// Whether some spectrum exists; stops at the first one.
pub fn is_spectral_set(a: &GroupSubset) -> Result<bool> {
    Ok(!spectrum_search(a, None, true)?.sets.is_empty())
}
