/// Capacity caps for the brute-force procedures. Every cap is a plain field
/// so callers (and the CLI's environment overrides) can adjust them, but the
/// defaults are the documented desk-scale envelope.
#[derive(Clone, Debug)]
pub struct Limits {
    /// Largest arity for which a circuit's full truth table is materialized.
    pub max_truth_table_arity: usize,
    /// Largest length for which a property is measured over the full cube
    /// (exact density, exact acceptance, discrepancy).
    pub max_density_len: usize,
    /// Largest generator seed length whose 2^l seeds are enumerated.
    pub max_seed_len: usize,
    /// Largest arity accepted by the exact minimum-circuit-size search.
    pub max_complexity_arity: usize,
    /// Largest arity for which the gate-bounded function table is built
    /// (easy-witness sets need arity = ceil(log2 n), so this caps n at 2^4).
    pub max_coverage_arity: usize,
    /// Ceiling on the number of circuits a single enumeration may stream.
    pub max_stream_circuits: u64,
    /// Ceiling on the universe size the greedy design search may reach.
    pub max_design_universe: usize,
    /// Worker threads for the full-cube counting loops. 1 keeps every run
    /// sequential; counts are exact, so any value produces identical output.
    pub threads: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_truth_table_arity: 24,
            max_density_len: 24,
            max_seed_len: 24,
            max_complexity_arity: 4,
            max_coverage_arity: 4,
            max_stream_circuits: 1 << 26,
            max_design_universe: 1024,
            threads: 1,
        }
    }
}

impl Limits {
    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    /// Defaults adjusted by `HITFORGE_*` environment variables, one per
    /// field; unparsable values are ignored rather than fatal.
    pub fn from_env() -> Self {
        fn read(name: &str, into: &mut usize) {
            if let Some(v) = std::env::var(name).ok().and_then(|s| s.parse().ok()) {
                *into = v;
            }
        }
        let mut limits = Limits::default();
        read("HITFORGE_MAX_TT_ARITY", &mut limits.max_truth_table_arity);
        read("HITFORGE_MAX_DENSITY_LEN", &mut limits.max_density_len);
        read("HITFORGE_MAX_SEED_LEN", &mut limits.max_seed_len);
        read("HITFORGE_MAX_COMPLEXITY_ARITY", &mut limits.max_complexity_arity);
        read("HITFORGE_MAX_COVERAGE_ARITY", &mut limits.max_coverage_arity);
        if let Some(v) = std::env::var("HITFORGE_MAX_STREAM").ok().and_then(|s| s.parse().ok()) {
            limits.max_stream_circuits = v;
        }
        read("HITFORGE_MAX_UNIVERSE", &mut limits.max_design_universe);
        read("HITFORGE_THREADS", &mut limits.threads);
        limits.threads = limits.threads.max(1);
        limits
    }
}
