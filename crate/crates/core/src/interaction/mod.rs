mod ast;
mod eval;
mod families;
pub mod oracle;

pub use ast::{enumerate_all, enumerate_h, enumerate_shapes, permutations4, AstError, Shape, SignedTerm, TermAst};
pub use eval::{i_factor_sign, max_order, EvalError, Evaluator, SymbolValue};
pub use families::{
    a4_coefficient, classify_rho40_terms, eval_i_cancellation, family_of, group_sums, i_term, item_parts, item_terms,
    item_value, leading_multiple, matching_final_form, quoted_final_forms, quoted_i_coefficients, quoted_item_values,
    total_symbol, Basis, Classification, ICancellation, ItemPart, ItemValue, QuotedValue, ScannedTerm, I_TERMS,
};
pub use oracle::NumericOracle;
