/// Resource guards for the exponential enumerations, plus the worker cap.
///
/// Every procedure that enumerates an exponential family checks the relevant
/// bound before it starts and fails with [`Error::Guard`](crate::Error::Guard)
/// instead of running away.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Settings {
    /// Largest domain `max_team` will materialise (2^n rows).
    pub max_domain: usize,
    /// Largest team the split-enumerating evaluator accepts when the formula
    /// contains a disjunction.
    pub max_split_rows: usize,
    /// Largest number of successor-choice functions a single diamond may
    /// enumerate in the choice-function evaluator.
    pub max_choices: u128,
    /// Largest antichain of maximal satisfying subteams tracked per subformula.
    pub max_antichain: usize,
    /// Largest number of intuitionistic-disjunction occurrences eliminated by
    /// selection functions (2^n disjuncts).
    pub max_selections: usize,
    /// Largest total number of Skolem-table bits searched by `dqbf_eval`.
    pub max_skolem_bits: usize,
    /// Largest arity of a modal dependence atom accepted by the translation.
    pub max_dep_arity: usize,
    /// Largest model size for exhaustive small-model validity.
    pub max_small_model_worlds: usize,
    /// Largest vocabulary for exhaustive small-model validity.
    pub max_small_model_symbols: usize,
    /// Worker cap for the parallel searches. `1` means sequential.
    pub jobs: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            max_domain: 20,
            max_split_rows: 24,
            max_choices: 1 << 20,
            max_antichain: 1 << 16,
            max_selections: 20,
            max_skolem_bits: 24,
            max_dep_arity: 10,
            max_small_model_worlds: 4,
            max_small_model_symbols: 2,
            jobs: 1,
        }
    }
}
