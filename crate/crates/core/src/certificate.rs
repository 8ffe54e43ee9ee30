//! Fully instantiated method parameters.

use std::fmt;

use crate::interp::{InterpKind, Interpretation};
use crate::orders::{Precedence, WeightFn};
use crate::trs::Trs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Lpo,
    Kbo,
    Poly,
    Matrix,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Lpo => "lpo",
            Method::Kbo => "kbo",
            Method::Poly => "poly",
            Method::Matrix => "matrix",
        }
    }

    pub fn from_name(name: &str) -> Option<Method> {
        match name {
            "lpo" => Some(Method::Lpo),
            "kbo" => Some(Method::Kbo),
            "poly" => Some(Method::Poly),
            "matrix" => Some(Method::Matrix),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Certificate {
    Lpo {
        precedence: Precedence,
    },
    Kbo {
        precedence: Precedence,
        weights: WeightFn,
    },
    Interp(Interpretation),
}

impl Certificate {
    pub fn method(&self) -> Method {
        match self {
            Certificate::Lpo { .. } => Method::Lpo,
            Certificate::Kbo { .. } => Method::Kbo,
            Certificate::Interp(i) if i.kind() == InterpKind::Poly => Method::Poly,
            Certificate::Interp(_) => Method::Matrix,
        }
    }

    pub fn precedence(&self) -> Option<&Precedence> {
        match self {
            Certificate::Lpo { precedence } | Certificate::Kbo { precedence, .. } => {
                Some(precedence)
            }
            Certificate::Interp(_) => None,
        }
    }

    pub fn weights(&self) -> Option<&WeightFn> {
        match self {
            Certificate::Kbo { weights, .. } => Some(weights),
            _ => None,
        }
    }

    pub fn interpretation(&self) -> Option<&Interpretation> {
        match self {
            Certificate::Interp(i) => Some(i),
            _ => None,
        }
    }

    /// Parameter lines of a proof, one per line, without the method header.
    pub fn display<'a>(&'a self, trs: &'a Trs) -> impl fmt::Display + 'a {
        DisplayCert { cert: self, trs }
    }
}

struct DisplayCert<'a> {
    cert: &'a Certificate,
    trs: &'a Trs,
}

fn mode_name(p: &Precedence) -> &'static str {
    match p.mode() {
        crate::orders::PrecMode::Strict => "strict",
        crate::orders::PrecMode::Quasi => "quasi",
    }
}

impl fmt::Display for DisplayCert<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let trs = self.trs;
        match self.cert {
            Certificate::Lpo { precedence } => {
                writeln!(
                    f,
                    "precedence ({}): {}",
                    mode_name(precedence),
                    precedence.display(trs)
                )
            }
            Certificate::Kbo {
                precedence,
                weights,
            } => {
                writeln!(
                    f,
                    "precedence ({}): {}",
                    mode_name(precedence),
                    precedence.display(trs)
                )?;
                writeln!(f, "w0 = {}", weights.w0())?;
                for g in trs.sym_ids() {
                    writeln!(f, "w({}) = {}", trs.symbol(g).name, weights.weights()[g.0])?;
                }
                Ok(())
            }
            Certificate::Interp(i) => {
                if i.kind() == InterpKind::Matrix {
                    writeln!(f, "dimension {}", i.dim())?;
                }
                write!(f, "{}", i.display(trs))
            }
        }
    }
}
