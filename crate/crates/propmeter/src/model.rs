//! Problem representation: variable domains, two-sided linear constraints,
//! and validated instances with a column-to-constraint index.

use thiserror::Error;

use crate::ext::ExtReal;

/// Closed interval domain for one variable, optionally integral.
///
/// `lower` is never `+inf` and `upper` is never `-inf`; `lower <= upper`
/// always holds for constructed domains. Propagation may drive working
/// bounds past each other, but that immediately flags infeasibility and is
/// never stored back into a domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariableDomain {
    lower: ExtReal,
    upper: ExtReal,
    is_integer: bool,
}

/// `lhs <= a'x <= rhs`. Terms are stored sorted by variable index with no
/// duplicates and no zero coefficients; at most one side may be infinite.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearConstraint {
    terms: Vec<(usize, f64)>,
    lhs: ExtReal,
    rhs: ExtReal,
}

/// A validated instance. `column_index[j]` lists, in ascending order, the
/// constraints whose term list contains variable `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    domains: Vec<VariableDomain>,
    constraints: Vec<LinearConstraint>,
    column_index: Vec<Vec<usize>>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("variable {variable}: lower bound must not be +inf")]
    LowerIsPosInf { variable: usize },
    #[error("variable {variable}: upper bound must not be -inf")]
    UpperIsNegInf { variable: usize },
    #[error("variable {variable}: lower bound {lower} exceeds upper bound {upper}")]
    EmptyDomain {
        variable: usize,
        lower: ExtReal,
        upper: ExtReal,
    },
    #[error("variable {variable}: integer domain has non-integral finite bound {value}")]
    FractionalIntegerBound { variable: usize, value: f64 },
    #[error("constraint {constraint}: variable {variable} has zero coefficient")]
    ZeroCoefficient { constraint: usize, variable: usize },
    #[error("constraint {constraint}: variable {variable} has non-finite coefficient")]
    NonFiniteCoefficient { constraint: usize, variable: usize },
    #[error("constraint {constraint}: variable {variable} appears more than once")]
    DuplicateTerm { constraint: usize, variable: usize },
    #[error("constraint {constraint}: variable {variable} out of range (instance has {num_vars} variables)")]
    UnknownVariable {
        constraint: usize,
        variable: usize,
        num_vars: usize,
    },
    #[error("constraint {constraint}: left side {lhs} exceeds right side {rhs}")]
    SidesOutOfOrder {
        constraint: usize,
        lhs: ExtReal,
        rhs: ExtReal,
    },
    #[error("constraint {constraint}: both sides are infinite")]
    BothSidesInfinite { constraint: usize },
}

impl VariableDomain {
    pub fn new(lower: ExtReal, upper: ExtReal, is_integer: bool) -> Result<Self, ModelError> {
        Self::validated(0, lower, upper, is_integer)
    }

    pub fn continuous(lower: ExtReal, upper: ExtReal) -> Result<Self, ModelError> {
        Self::new(lower, upper, false)
    }

    pub fn integer(lower: ExtReal, upper: ExtReal) -> Result<Self, ModelError> {
        Self::new(lower, upper, true)
    }

    fn validated(
        variable: usize,
        lower: ExtReal,
        upper: ExtReal,
        is_integer: bool,
    ) -> Result<Self, ModelError> {
        if lower.is_pos_inf() {
            return Err(ModelError::LowerIsPosInf { variable });
        }
        if upper.is_neg_inf() {
            return Err(ModelError::UpperIsNegInf { variable });
        }
        if lower > upper {
            return Err(ModelError::EmptyDomain {
                variable,
                lower,
                upper,
            });
        }
        if is_integer {
            for bound in [lower, upper] {
                if let Some(v) = bound.finite_value() {
                    if v.fract() != 0.0 {
                        return Err(ModelError::FractionalIntegerBound { variable, value: v });
                    }
                }
            }
        }
        Ok(VariableDomain {
            lower,
            upper,
            is_integer,
        })
    }

    pub fn lower(&self) -> ExtReal {
        self.lower
    }

    pub fn upper(&self) -> ExtReal {
        self.upper
    }

    pub fn is_integer(&self) -> bool {
        self.is_integer
    }
}

impl LinearConstraint {
    /// Builds a constraint, sorting terms into canonical ascending-index
    /// order. Validation that requires instance context (variable indices
    /// in range) happens in [`ProblemInstance::new`].
    pub fn new(
        mut terms: Vec<(usize, f64)>,
        lhs: ExtReal,
        rhs: ExtReal,
    ) -> Result<Self, ModelError> {
        Self::validated(0, &mut terms, lhs, rhs)?;
        Ok(LinearConstraint { terms, lhs, rhs })
    }

    fn validated(
        constraint: usize,
        terms: &mut [(usize, f64)],
        lhs: ExtReal,
        rhs: ExtReal,
    ) -> Result<(), ModelError> {
        for &(variable, coef) in terms.iter() {
            if !coef.is_finite() {
                return Err(ModelError::NonFiniteCoefficient {
                    constraint,
                    variable,
                });
            }
            if coef == 0.0 {
                return Err(ModelError::ZeroCoefficient {
                    constraint,
                    variable,
                });
            }
        }
        terms.sort_by_key(|&(j, _)| j);
        for pair in terms.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(ModelError::DuplicateTerm {
                    constraint,
                    variable: pair[0].0,
                });
            }
        }
        if lhs.is_neg_inf() && rhs.is_pos_inf() {
            return Err(ModelError::BothSidesInfinite { constraint });
        }
        if lhs.is_pos_inf() || rhs.is_neg_inf() || lhs > rhs {
            return Err(ModelError::SidesOutOfOrder {
                constraint,
                lhs,
                rhs,
            });
        }
        Ok(())
    }

    pub fn terms(&self) -> &[(usize, f64)] {
        &self.terms
    }

    pub fn lhs(&self) -> ExtReal {
        self.lhs
    }

    pub fn rhs(&self) -> ExtReal {
        self.rhs
    }

    /// Coefficient of `variable` in this constraint, if present.
    pub fn coefficient(&self, variable: usize) -> Option<f64> {
        self.terms
            .binary_search_by_key(&variable, |&(j, _)| j)
            .ok()
            .map(|pos| self.terms[pos].1)
    }
}

impl ProblemInstance {
    /// Validates all domains and constraints and builds the column index.
    pub fn new(
        domains: Vec<VariableDomain>,
        constraints: Vec<LinearConstraint>,
    ) -> Result<Self, ModelError> {
        let num_vars = domains.len();
        for (i, c) in constraints.iter().enumerate() {
            // Re-run shape validation so errors carry the constraint index,
            // then check index range against this instance.
            let mut terms = c.terms.clone();
            LinearConstraint::validated(i, &mut terms, c.lhs, c.rhs)?;
            for &(j, _) in &c.terms {
                if j >= num_vars {
                    return Err(ModelError::UnknownVariable {
                        constraint: i,
                        variable: j,
                        num_vars,
                    });
                }
            }
        }
        let mut column_index = vec![Vec::new(); num_vars];
        for (i, c) in constraints.iter().enumerate() {
            for &(j, _) in &c.terms {
                column_index[j].push(i);
            }
        }
        Ok(ProblemInstance {
            domains,
            constraints,
            column_index,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn domains(&self) -> &[VariableDomain] {
        &self.domains
    }

    pub fn domain(&self, variable: usize) -> &VariableDomain {
        &self.domains[variable]
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn constraint(&self, index: usize) -> &LinearConstraint {
        &self.constraints[index]
    }

    /// Constraints containing `variable`, ascending.
    pub fn column(&self, variable: usize) -> &[usize] {
        &self.column_index[variable]
    }
}
