//! Finite-domain constraint search with conflict-directed backjumping.
//!
//! Variables are assigned in index order and values are tried in the order
//! their domain lists them, so the first solution found is the
//! lexicographically smallest one. Backjumping only skips subtrees that are
//! provably free of solutions, which keeps that guarantee intact.

use std::time::Instant;

use fixedbitset::FixedBitSet;

/// Candidate state the search writes values into and checks constraints against.
pub(crate) trait Model {
    fn assign(&mut self, var: usize, value: u64);
    /// Forgets the value of `var`; called for every variable the search
    /// backs up over.
    fn unassign(&mut self, var: usize);
    /// Evaluates a constraint; only variables in its scope may be read.
    /// Early constraints are also evaluated while some of their variables
    /// are unassigned and must then only fail if no completion can succeed.
    fn check(&self, constraint: usize) -> bool;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum SearchResult {
    Found(Vec<u64>),
    Exhausted,
    Timeout,
}

const DEADLINE_POLL: u64 = 1024;

#[derive(Debug, Clone)]
pub(crate) struct Csp {
    domains: Vec<Vec<u64>>,
    scopes: Vec<FixedBitSet>,
    /// Constraints indexed by the highest variable of their scope.
    watch: Vec<Vec<usize>>,
    ground: Vec<usize>,
}

impl Csp {
    pub(crate) fn new(domains: Vec<Vec<u64>>) -> Self {
        let n = domains.len();
        Csp {
            domains,
            scopes: Vec::new(),
            watch: vec![Vec::new(); n],
            ground: Vec::new(),
        }
    }

    /// Registers a constraint over `scope`; ids are handed out consecutively
    /// from 0. An `early` constraint is checked after each assignment to a
    /// variable of its scope, any other one once its whole scope is assigned.
    pub(crate) fn add(&mut self, scope: impl IntoIterator<Item = usize>, early: bool) -> usize {
        let id = self.scopes.len();
        let mut bits = FixedBitSet::with_capacity(self.domains.len());
        bits.extend(scope);
        match bits.maximum() {
            Some(_) if early => bits.ones().for_each(|v| self.watch[v].push(id)),
            Some(last) => self.watch[last].push(id),
            None => self.ground.push(id),
        }
        self.scopes.push(bits);
        id
    }

    pub(crate) fn solve(&self, model: &mut impl Model, deadline: Option<Instant>) -> SearchResult {
        if !self.ground.iter().all(|&c| model.check(c)) {
            return SearchResult::Exhausted;
        }
        let n = self.domains.len();
        if n == 0 {
            return SearchResult::Found(Vec::new());
        }
        let mut next = vec![0usize; n];
        let mut values = vec![0u64; n];
        let mut conflicts = vec![FixedBitSet::with_capacity(n); n];
        let mut nodes: u64 = 0;
        let mut i = 0;
        loop {
            let mut consistent = false;
            while next[i] < self.domains[i].len() {
                nodes += 1;
                if nodes.is_multiple_of(DEADLINE_POLL)
                    && deadline.is_some_and(|d| Instant::now() >= d)
                {
                    return SearchResult::Timeout;
                }
                let v = self.domains[i][next[i]];
                next[i] += 1;
                model.assign(i, v);
                values[i] = v;
                match self.watch[i].iter().find(|&&c| !model.check(c)) {
                    None => {
                        consistent = true;
                        break;
                    }
                    Some(&c) => {
                        // Only the assigned part of the scope can be to blame.
                        conflicts[i].union_with(&self.scopes[c]);
                        conflicts[i].remove_range(i..);
                    }
                }
            }
            if consistent {
                i += 1;
                if i == n {
                    return SearchResult::Found(values);
                }
                next[i] = 0;
                conflicts[i].clear();
                continue;
            }
            let Some(h) = conflicts[i].maximum() else {
                return SearchResult::Exhausted;
            };
            for j in h + 1..=i {
                model.unassign(j);
            }
            let culprit = std::mem::replace(&mut conflicts[i], FixedBitSet::with_capacity(n));
            conflicts[h].union_with(&culprit);
            conflicts[h].set(h, false);
            i = h;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Check = Box<dyn Fn(&[u64]) -> bool>;

    /// Constraints given as closures over the full assignment.
    struct Closures {
        values: Vec<u64>,
        checks: Vec<Check>,
    }

    impl Model for Closures {
        fn assign(&mut self, var: usize, value: u64) {
            self.values[var] = value;
        }
        fn unassign(&mut self, _: usize) {}
        fn check(&self, c: usize) -> bool {
            (self.checks[c])(&self.values)
        }
    }

    fn brute_force(domains: &[Vec<u64>], ok: &dyn Fn(&[u64]) -> bool) -> Option<Vec<u64>> {
        let mut idx = vec![0usize; domains.len()];
        loop {
            let v: Vec<u64> = idx.iter().zip(domains).map(|(&i, d)| d[i]).collect();
            if ok(&v) {
                return Some(v);
            }
            let mut k = domains.len();
            loop {
                if k == 0 {
                    return None;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < domains[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    #[test]
    fn finds_lexicographically_first_solution() {
        let domains = vec![vec![0, 1, 2, 3]; 4];
        let mut csp = Csp::new(domains.clone());
        csp.add([0, 3], false);
        csp.add([1, 2], false);
        csp.add([0, 1, 2, 3], false);
        let checks: Vec<Check> = vec![
            Box::new(|v| v[0] + v[3] == 4),
            Box::new(|v| v[1] > v[2]),
            Box::new(|v| v.iter().sum::<u64>() >= 7),
        ];
        let all = |v: &[u64]| v[0] + v[3] == 4 && v[1] > v[2] && v.iter().sum::<u64>() >= 7;
        let mut m = Closures {
            values: vec![0; 4],
            checks,
        };
        let expected = brute_force(&domains, &all).unwrap();
        assert_eq!(csp.solve(&mut m, None), SearchResult::Found(expected));
    }

    #[test]
    fn reports_exhaustion() {
        let mut csp = Csp::new(vec![vec![0, 1]; 3]);
        csp.add([0, 2], false);
        let mut m = Closures {
            values: vec![0; 3],
            checks: vec![Box::new(|v| v[0] + v[2] > 5)],
        };
        assert_eq!(csp.solve(&mut m, None), SearchResult::Exhausted);
    }

    #[test]
    fn ground_constraints_and_empty_problem() {
        let mut csp = Csp::new(vec![]);
        csp.add([], false);
        let mut yes = Closures {
            values: vec![],
            checks: vec![Box::new(|_| true)],
        };
        assert_eq!(csp.solve(&mut yes, None), SearchResult::Found(vec![]));
        let mut no = Closures {
            values: vec![],
            checks: vec![Box::new(|_| false)],
        };
        assert_eq!(csp.solve(&mut no, None), SearchResult::Exhausted);
    }

    #[test]
    fn empty_domain_is_exhausted() {
        let csp = Csp::new(vec![vec![0, 1], vec![]]);
        let mut m = Closures {
            values: vec![0; 2],
            checks: vec![],
        };
        assert_eq!(csp.solve(&mut m, None), SearchResult::Exhausted);
    }

    #[test]
    fn expired_deadline_times_out() {
        let mut csp = Csp::new(vec![(0..10).collect(); 6]);
        csp.add(0..6, false);
        let mut m = Closures {
            values: vec![0; 6],
            checks: vec![Box::new(|_| false)],
        };
        assert_eq!(
            csp.solve(&mut m, Some(Instant::now())),
            SearchResult::Timeout
        );
    }

    #[test]
    fn agrees_with_brute_force_on_random_problems() {
        use rand::rngs::StdRng;
        use rand::{RngExt, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.random_range(1..=5);
            let domains: Vec<Vec<u64>> = (0..n)
                .map(|_| (0..rng.random_range(1..=4)).collect())
                .collect();
            let mut csp = Csp::new(domains.clone());
            let mut specs = Vec::new();
            for _ in 0..rng.random_range(0..=4) {
                let a = rng.random_range(0..n);
                let b = rng.random_range(0..n);
                let k: u64 = rng.random_range(0..6);
                csp.add([a, b], false);
                specs.push((a, b, k, rng.random_bool(0.5)));
            }
            let holds = |v: &[u64], &(a, b, k, lt): &(usize, usize, u64, bool)| {
                if lt {
                    v[a] + v[b] <= k
                } else {
                    v[a] * 2 + v[b] != k
                }
            };
            let checks: Vec<Check> = specs
                .iter()
                .map(|s| {
                    let s = *s;
                    Box::new(move |v: &[u64]| holds(v, &s)) as Check
                })
                .collect();
            let expected = brute_force(&domains, &|v| specs.iter().all(|s| holds(v, s)));
            let mut m = Closures {
                values: vec![0; n],
                checks,
            };
            let got = csp.solve(&mut m, None);
            match expected {
                Some(v) => assert_eq!(got, SearchResult::Found(v)),
                None => assert_eq!(got, SearchResult::Exhausted),
            }
        }
    }
}
