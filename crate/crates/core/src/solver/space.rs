//! Parameter spaces and their restriction by template literals.

use std::collections::{BTreeMap, HashMap};

use crate::certificate::Method;
use crate::template::{CheckedAtom, Literal, WeightRel};
use crate::trs::{SymId, Trs};

use super::SearchConfig;

/// One scalar search parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    W0,
    Weight(SymId),
    Level(SymId),
    /// Row-major entry of the coefficient matrix of argument `arg`.
    Coeff {
        sym: SymId,
        arg: usize,
        entry: usize,
    },
    Constant {
        sym: SymId,
        entry: usize,
    },
}

/// Ordered parameters with ascending finite domains. The order of `params`
/// is the search order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    params: Vec<Param>,
    domains: Vec<Vec<u64>>,
    index: HashMap<Param, usize>,
}

impl Space {
    /// Unrestricted space of `method` over the signature of `trs`.
    ///
    /// Layout: levels for LPO; `w0`, then all weights, then all levels for
    /// KBO; per symbol the coefficient entries of each argument followed by
    /// the constant entries for interpretations. Diagonal-leading entries
    /// `(0,0)` of coefficients start at 1 so every candidate is monotone.
    pub fn new(trs: &Trs, method: Method, cfg: &SearchConfig, dim: usize) -> Space {
        let n = trs.symbols().len();
        let levels = (0..n.max(1) as u64).collect::<Vec<_>>();
        let mut entries: Vec<(Param, Vec<u64>)> = Vec::new();
        match method {
            Method::Lpo => entries.extend(trs.sym_ids().map(|f| (Param::Level(f), levels.clone()))),
            Method::Kbo => {
                let w0 = match cfg.w0 {
                    Some(w) => vec![w],
                    None => (1..=cfg.weight_bound.max(1)).collect(),
                };
                entries.push((Param::W0, w0));
                entries.extend(
                    trs.sym_ids()
                        .map(|f| (Param::Weight(f), (0..=cfg.weight_bound).collect())),
                );
                entries.extend(trs.sym_ids().map(|f| (Param::Level(f), levels.clone())));
            }
            Method::Poly | Method::Matrix => {
                let bound = if method == Method::Poly {
                    cfg.coeff_bound
                } else {
                    cfg.entry_bound
                };
                for f in trs.sym_ids() {
                    for arg in 0..trs.arity(f) {
                        for entry in 0..dim * dim {
                            let lo = u64::from(entry == 0);
                            entries.push((
                                Param::Coeff { sym: f, arg, entry },
                                (lo..=bound.max(lo)).collect(),
                            ));
                        }
                    }
                    for entry in 0..dim {
                        entries.push((Param::Constant { sym: f, entry }, (0..=bound).collect()));
                    }
                }
            }
        }
        let (params, domains): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        let index = params.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        Space {
            params,
            domains,
            index,
        }
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn domains(&self) -> &[Vec<u64>] {
        &self.domains
    }

    pub fn index_of(&self, p: Param) -> Option<usize> {
        self.index.get(&p).copied()
    }

    pub fn domain(&self, p: Param) -> Option<&[u64]> {
        self.index_of(p).map(|i| self.domains[i].as_slice())
    }

    /// Number of candidates, saturating.
    pub fn size(&self) -> u128 {
        self.domains
            .iter()
            .fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
    }

    /// Parameters a template atom talks about, in search order.
    pub(crate) fn atom_params(&self, atom: &CheckedAtom) -> Vec<usize> {
        let mut out: Vec<usize> = match atom {
            CheckedAtom::Prec(a) => a
                .symbols()
                .filter_map(|f| self.index_of(Param::Level(*f)))
                .collect(),
            CheckedAtom::Weights(a) => a
                .symbols
                .iter()
                .filter_map(|f| self.index_of(Param::Weight(*f)))
                .collect(),
            CheckedAtom::Inters(p) => self
                .params
                .iter()
                .enumerate()
                .filter(|(_, q)| match q {
                    Param::Coeff { sym, .. } | Param::Constant { sym, .. } => {
                        p.symbols.contains(sym)
                    }
                    _ => false,
                })
                .map(|(i, _)| i)
                .collect(),
        };
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// A space narrowed by the positive exact and bound atoms of one disjunct;
/// everything else is kept as a filter over full candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restricted {
    pub space: Space,
    pub filters: Vec<Literal<CheckedAtom>>,
}

/// Some parameter was left with an empty domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmptyDomain(pub Param);

#[derive(Default)]
struct Narrowing {
    pin: Option<u64>,
    conflict: bool,
    lo: u64,
    hi: Option<u64>,
}

impl Narrowing {
    fn pin(&mut self, v: u64) {
        match self.pin {
            Some(p) if p != v => self.conflict = true,
            _ => self.pin = Some(v),
        }
    }
}

/// Narrows `space` by the literals of one disjunct.
///
/// Exact values override the configured search bound (a template may pin a
/// weight above it); lower bounds above the search bound extend the range up
/// to the lower bound itself.
pub fn restrict_domains(
    disjunct: &[Literal<CheckedAtom>],
    space: &Space,
) -> Result<Restricted, EmptyDomain> {
    let mut narrow: BTreeMap<usize, Narrowing> = BTreeMap::new();
    let mut filters = Vec::new();
    for lit in disjunct {
        match (&lit.atom, lit.positive) {
            (CheckedAtom::Weights(a), true) => {
                for f in &a.symbols {
                    let Some(i) = space.index_of(Param::Weight(*f)) else {
                        filters.push(lit.clone());
                        break;
                    };
                    let n = narrow.entry(i).or_default();
                    match a.rel {
                        WeightRel::Eq => n.pin(a.weight),
                        WeightRel::Le => n.hi = Some(n.hi.map_or(a.weight, |h| h.min(a.weight))),
                        WeightRel::Ge => n.lo = n.lo.max(a.weight),
                    }
                }
            }
            (CheckedAtom::Inters(p), true) => {
                let mut pins = Vec::new();
                let mut representable = true;
                for f in &p.symbols {
                    for (i, param) in space.params.iter().enumerate() {
                        let pattern = match *param {
                            Param::Coeff { sym, arg, entry } if sym == *f => {
                                p.coeff(arg).map(|c| c[entry])
                            }
                            Param::Constant { sym, entry } if sym == *f => {
                                p.constant().map(|c| c[entry])
                            }
                            _ => continue,
                        };
                        if let Some(Some(v)) = pattern {
                            pins.push((i, v));
                        }
                    }
                    representable &= space
                        .params
                        .iter()
                        .any(|q| matches!(q, Param::Constant { sym, .. } if sym == f));
                }
                if !representable || p.dim != dim_of(space) {
                    filters.push(lit.clone());
                    continue;
                }
                for (i, v) in pins {
                    narrow.entry(i).or_default().pin(v);
                }
            }
            _ => filters.push(lit.clone()),
        }
    }
    let mut restricted = space.clone();
    for (i, n) in narrow {
        let base = &space.domains[i];
        let (base_lo, base_hi) = (
            base.first().copied().unwrap_or(0),
            base.last().copied().unwrap_or(0),
        );
        let hi_user = n.hi.unwrap_or(u64::MAX);
        let domain: Vec<u64> = match n.pin {
            _ if n.conflict => Vec::new(),
            Some(v) if v >= base_lo && v >= n.lo && v <= hi_user => vec![v],
            Some(_) => Vec::new(),
            None => {
                let lo = base_lo.max(n.lo);
                let hi = hi_user.min(base_hi.max(n.lo));
                if lo <= hi {
                    (lo..=hi).collect()
                } else {
                    Vec::new()
                }
            }
        };
        if domain.is_empty() {
            return Err(EmptyDomain(space.params[i]));
        }
        restricted.domains[i] = domain;
    }
    Ok(Restricted {
        space: restricted,
        filters,
    })
}

/// Dimension of an interpretation space: the number of constant entries per symbol.
fn dim_of(space: &Space) -> usize {
    let first = space.params.iter().find_map(|p| match p {
        Param::Constant { sym, .. } => Some(*sym),
        _ => None,
    });
    first.map_or(0, |f| {
        space
            .params
            .iter()
            .filter(|p| matches!(p, Param::Constant { sym, .. } if *sym == f))
            .count()
    })
}
