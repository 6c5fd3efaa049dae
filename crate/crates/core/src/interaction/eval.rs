use super::ast::{SignedTerm, TermAst};
use crate::algebra::{MaxPlus, RhoRational};
use crate::null_geometry::NullConfig;
use crate::ricci::{family, symbol_of_form, FormError, FormKind, SlotData};
use crate::tensor::{norm_sq, CoVec4, Sym2T};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("characteristic denominator: ζ sum over waves {subset:?} is light-like")]
    CharacteristicDenominator { subset: Vec<u8> },
    #[error("unsplit form {0} cannot be evaluated")]
    Unsplit(String),
    #[error("wave index {0} is outside 1..4")]
    WaveIndex(u8),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Principal symbol of a (sub)term with the powers of i kept aside.
///
/// The symbol itself is i^{i_power}·matrix times (2π)^{-3·prefactor_2pi}.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolValue {
    pub matrix: Sym2T,
    pub total_covector: CoVec4,
    pub i_power: u32,
    pub prefactor_2pi: u32,
}

impl SymbolValue {
    /// sign·i^{i_power}·matrix; None for an odd power of i.
    pub fn real_part_signed(&self, sign: i8) -> Option<Sym2T> {
        if self.i_power % 2 == 1 {
            return None;
        }
        let flip = (self.i_power / 2) % 2 == 1;
        let s = if flip { -sign } else { sign };
        Some(if s < 0 {
            self.matrix.scale_rational(&crate::algebra::int(-1))
        } else {
            self.matrix.clone()
        })
    }
}

pub fn i_factor_sign(i_power: u32) -> i8 {
    if (i_power / 2) % 2 == 1 {
        -1
    } else {
        1
    }
}

/// Memoizing evaluator bound to one configuration and one set of wave symbols.
pub struct Evaluator {
    config: NullConfig,
    leaves: [Sym2T; 4],
    memo: Mutex<HashMap<TermAst, Arc<SymbolValue>>>,
}

impl Evaluator {
    /// Waves carry ζ⊗ζ.
    pub fn new(config: &NullConfig) -> Self {
        let leaves = std::array::from_fn(|i| Sym2T::outer_square(config.zeta(i + 1)));
        Self::with_leaves(config, leaves)
    }

    pub fn with_leaves(config: &NullConfig, leaves: [Sym2T; 4]) -> Self {
        Evaluator {
            config: config.clone(),
            leaves,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> &NullConfig {
        &self.config
    }

    pub fn leaf_symbol(&self, i: u8) -> &Sym2T {
        &self.leaves[i as usize - 1]
    }

    pub fn eval(&self, ast: &TermAst) -> Result<Arc<SymbolValue>, EvalError> {
        if let Some(v) = self.memo.lock().unwrap().get(ast) {
            return Ok(v.clone());
        }
        let v = Arc::new(self.eval_uncached(ast)?);
        self.memo.lock().unwrap().insert(ast.clone(), v.clone());
        Ok(v)
    }

    fn eval_uncached(&self, ast: &TermAst) -> Result<SymbolValue, EvalError> {
        match ast {
            TermAst::Leaf(i) => {
                if !(1..=4).contains(i) {
                    return Err(EvalError::WaveIndex(*i));
                }
                Ok(SymbolValue {
                    matrix: self.leaves[*i as usize - 1].clone(),
                    total_covector: self.config.zeta(*i as usize).clone(),
                    i_power: 0,
                    prefactor_2pi: 0,
                })
            }
            TermAst::Q(c) => {
                let v = self.eval(c)?;
                let n = norm_sq(self.config.metric(), &v.total_covector);
                let inv = n.inv().map_err(|_| EvalError::CharacteristicDenominator {
                    subset: sorted(c.leaves()),
                })?;
                Ok(SymbolValue {
                    matrix: v.matrix.scale(&inv),
                    ..(*v).clone()
                })
            }
            TermAst::Form(key, cs) => {
                if key.kind == FormKind::G {
                    return Err(EvalError::Unsplit(ast.to_string()));
                }
                let vals = cs.iter().map(|c| self.eval(c)).collect::<Result<Vec<_>, _>>()?;
                let assignment: Vec<(Sym2T, CoVec4)> = vals
                    .iter()
                    .map(|v| (v.matrix.clone(), v.total_covector.clone()))
                    .collect();
                let fv = symbol_of_form(family().get(*key), &assignment, self.config.metric())?;
                let total = vals
                    .iter()
                    .skip(1)
                    .fold(vals[0].total_covector.clone(), |acc, v| &acc + &v.total_covector);
                Ok(SymbolValue {
                    matrix: fv.symmetric_part(),
                    total_covector: total,
                    i_power: fv.i_power + vals.iter().map(|v| v.i_power).sum::<u32>(),
                    prefactor_2pi: 1,
                })
            }
        }
    }

    /// Signed real contribution of one summand of ℋ.
    pub fn contribution(&self, t: &SignedTerm) -> Result<Sym2T, EvalError> {
        let v = self.eval(&t.ast)?;
        Ok(v.real_part_signed(t.sign)
            .expect("complete terms carry an even number of derivatives"))
    }

    /// Σ contributions, evaluated in parallel and reduced in list order.
    pub fn sum(&self, terms: &[SignedTerm]) -> Result<Sym2T, EvalError> {
        let parts: Vec<Sym2T> = terms
            .par_iter()
            .map(|t| self.contribution(t))
            .collect::<Result<_, _>>()?;
        Ok(parts.iter().fold(Sym2T::zero(), |acc, p| &acc + p))
    }

    /// Upper bound for the entry order of `ast`, from the same contraction run
    /// in the max-plus degree semiring. Leaves enter with the exact degrees of
    /// their entries and every Q with the exact degree of its norm.
    pub fn predicted_order(&self, ast: &TermAst) -> Result<[[MaxPlus; 4]; 4], EvalError> {
        Ok(self.predict(ast)?.0)
    }

    fn predict(&self, ast: &TermAst) -> Result<([[MaxPlus; 4]; 4], CoVec4), EvalError> {
        match ast {
            TermAst::Leaf(i) => {
                let m = &self.leaves[*i as usize - 1];
                Ok((degrees(m.matrix()), self.config.zeta(*i as usize).clone()))
            }
            TermAst::Q(c) => {
                let (m, xi) = self.predict(c)?;
                let n = norm_sq(self.config.metric(), &xi);
                let d = n
                    .infinity_degree()
                    .ok_or_else(|| EvalError::CharacteristicDenominator {
                        subset: sorted(c.leaves()),
                    })?;
                let shift = MaxPlus(Some(-d));
                Ok((m.map(|row| row.map(|x| crate::algebra::Ring::mul_ref(&x, &shift))), xi))
            }
            TermAst::Form(key, cs) => {
                if key.kind == FormKind::G {
                    return Err(EvalError::Unsplit(ast.to_string()));
                }
                let parts = cs.iter().map(|c| self.predict(c)).collect::<Result<Vec<_>, _>>()?;
                let slots: Vec<SlotData<MaxPlus>> = parts
                    .iter()
                    .map(|(m, xi)| SlotData {
                        matrix: *m,
                        covector: xi.components().each_ref().map(degree),
                    })
                    .collect();
                let g = degrees(self.config.metric().upper());
                let flat = family().get(*key).contract(&slots, &g)?;
                let m: [[MaxPlus; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| flat[4 * i + j]));
                let sym = std::array::from_fn(|i| std::array::from_fn(|j| MaxPlus(m[i][j].0.max(m[j][i].0))));
                let total = parts.iter().skip(1).fold(parts[0].1.clone(), |acc, p| &acc + &p.1);
                Ok((sym, total))
            }
        }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.lock().unwrap().len()
    }
}

fn degree(x: &RhoRational) -> MaxPlus {
    MaxPlus(x.infinity_degree())
}

fn degrees(m: &[[RhoRational; 4]; 4]) -> [[MaxPlus; 4]; 4] {
    m.each_ref().map(|row| row.each_ref().map(degree))
}

fn sorted(mut v: Vec<u8>) -> Vec<u8> {
    v.sort_unstable();
    v
}

/// max over entries of a max-plus matrix.
pub fn max_order(m: &[[MaxPlus; 4]; 4]) -> Option<i64> {
    m.iter().flatten().filter_map(|x| x.0).max()
}
