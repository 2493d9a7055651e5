use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use anyhow::Context;
use pitplot_core::{MetricKind, PitData, PortfolioSpec, SimConfig, ValidatedPortfolio};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey {
    portfolio: u64,
    config: u64,
    metric: MetricKind,
}

fn json_hash<T: Serialize>(value: &T) -> u64 {
    let mut h = DefaultHasher::new();
    serde_json::to_string(value)
        .expect("state serializes")
        .hash(&mut h);
    h.finish()
}

/// Portfolio and config as of one moment; computations run on a snapshot so
/// a concurrent PUT cannot change their inputs midway.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub portfolio: Option<ValidatedPortfolio>,
    pub config: SimConfig,
    portfolio_hash: u64,
    config_hash: u64,
}

impl Snapshot {
    fn new(portfolio: Option<ValidatedPortfolio>, config: SimConfig) -> Self {
        Self {
            portfolio_hash: json_hash(&portfolio.as_ref().map(|p| p.spec())),
            config_hash: json_hash(&config),
            portfolio,
            config,
        }
    }

    pub fn cache_key(&self, metric: MetricKind) -> CacheKey {
        CacheKey {
            portfolio: self.portfolio_hash,
            config: self.config_hash,
            metric,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct StateFile {
    portfolio: Option<PortfolioSpec>,
    config: SimConfig,
}

#[derive(Debug)]
struct Inner {
    session: RwLock<Arc<Snapshot>>,
    cache: Mutex<HashMap<CacheKey, PitData>>,
    state_file: Option<PathBuf>,
}

/// The single in-memory analysis session shared by all handlers.
#[derive(Debug, Clone)]
pub struct SessionState {
    inner: Arc<Inner>,
}

impl SessionState {
    pub fn new(portfolio: Option<ValidatedPortfolio>, config: SimConfig) -> Self {
        Self::with_state_file(portfolio, config, None)
    }

    fn with_state_file(portfolio: Option<ValidatedPortfolio>, config: SimConfig, state_file: Option<PathBuf>) -> Self {
        Self {
            inner: Arc::new(Inner {
                session: RwLock::new(Arc::new(Snapshot::new(portfolio, config))),
                cache: Mutex::new(HashMap::new()),
                state_file,
            }),
        }
    }

    /// Loads the session from `path` if it exists; later writes are saved
    /// back to it.
    pub fn load_or_default(path: &Path, default_config: SimConfig) -> anyhow::Result<Self> {
        let (portfolio, config) = if path.exists() {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let file: StateFile =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            let portfolio = match file.portfolio {
                Some(spec) => Some(
                    pitplot_core::validate_portfolio(spec)
                        .with_context(|| format!("portfolio in {}", path.display()))?,
                ),
                None => None,
            };
            file.config
                .validate()
                .with_context(|| format!("config in {}", path.display()))?;
            (portfolio, file.config)
        } else {
            (None, default_config)
        };
        Ok(Self::with_state_file(portfolio, config, Some(path.to_path_buf())))
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.inner.session.read().expect("session lock").clone()
    }

    /// Replaces the portfolio and/or config and drops every cached result.
    pub fn update(&self, portfolio: Option<ValidatedPortfolio>, config: Option<SimConfig>) -> Arc<Snapshot> {
        let mut session = self.inner.session.write().expect("session lock");
        let next = Snapshot::new(
            portfolio.or_else(|| session.portfolio.clone()),
            config.unwrap_or_else(|| session.config.clone()),
        );
        *session = Arc::new(next);
        self.inner.cache.lock().expect("cache lock").clear();
        session.clone()
    }

    pub fn cached(&self, key: &CacheKey) -> Option<PitData> {
        self.inner.cache.lock().expect("cache lock").get(key).cloned()
    }

    /// Stores a result unless the session changed since `key` was taken.
    pub fn store(&self, key: CacheKey, data: PitData) {
        // Holding the read lock keeps `update` from clearing in between.
        let current = self.inner.session.read().expect("session lock");
        if current.portfolio_hash == key.portfolio && current.config_hash == key.config {
            self.inner.cache.lock().expect("cache lock").insert(key, data);
        }
    }

    pub fn cache_len(&self) -> usize {
        self.inner.cache.lock().expect("cache lock").len()
    }

    /// Writes the session to the state file, if one is configured.
    pub fn save(&self) -> anyhow::Result<()> {
        let Some(path) = &self.inner.state_file else {
            return Ok(());
        };
        let snap = self.snapshot();
        let file = StateFile {
            portfolio: snap.portfolio.as_ref().map(|p| p.spec().clone()),
            config: snap.config.clone(),
        };
        let text = serde_json::to_string_pretty(&file)?;
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}
