//! Engine configuration. Every tuning constant is a config key with the
//! shipped default; a TOML file overlays the defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct Config {
    /// Root of data files: categories/, models/, gazetteer.tsv, geostop/,
    /// names/, subjects/.
    pub data_dir: PathBuf,
    pub cluster: ClusterConfig,
    pub breaking: BreakingConfig,
    pub linking: LinkingConfig,
    pub names: NamesConfig,
    pub subject: SubjectConfig,
    pub alerts: AlertConfig,
    pub geo: GeoConfig,
    pub quotes: QuoteConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            data_dir: PathBuf::from("data"),
            cluster: ClusterConfig::default(),
            breaking: BreakingConfig::default(),
            linking: LinkingConfig::default(),
            names: NamesConfig::default(),
            subject: SubjectConfig::default(),
            alerts: AlertConfig::default(),
            geo: GeoConfig::default(),
            quotes: QuoteConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct ClusterConfig {
    /// Stop threshold θ for agglomerative merging.
    pub theta: f64,
    /// Clustering window in minutes.
    pub window_minutes: i64,
    /// Window is extended until it holds at least this many articles.
    pub min_window_articles: usize,
    /// Processing round cadence in minutes (logical clock).
    pub cadence_minutes: i64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            theta: 0.5,
            window_minutes: 240,
            min_window_articles: 20,
            cadence_minutes: 10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct BreakingConfig {
    /// S_min: minimum cluster size for any breaking-news flag.
    pub min_articles: usize,
    /// D_min: minimum distinct sources for a new-large flag.
    pub min_sources: usize,
    /// R: last-30-minutes rate multiplier for a rapid-rise flag.
    pub rise_factor: f64,
    /// Trailing baseline period (minutes) the 30-minute rate is compared to.
    pub baseline_minutes: i64,
}

impl Default for BreakingConfig {
    fn default() -> Self {
        BreakingConfig {
            min_articles: 10,
            min_sources: 5,
            rise_factor: 4.0,
            baseline_minutes: 240,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct LinkingConfig {
    /// τ_link: minimum combined score for a cross-lingual edge.
    pub tau_link: f64,
    /// When false, signatures carry an empty subject vector and linking
    /// proceeds on the remaining ingredients.
    pub enable_subject: bool,
}

impl Default for LinkingConfig {
    fn default() -> Self {
        LinkingConfig {
            tau_link: 0.5,
            enable_subject: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct NamesConfig {
    /// τ_name: combined-similarity threshold for merging name variants.
    pub tau_name: f64,
    /// Weight of the surface/transliteration similarity; the normalized-form
    /// similarity gets the complement.
    pub surface_weight: f64,
}

impl Default for NamesConfig {
    fn default() -> Self {
        NamesConfig {
            tau_name: 0.85,
            surface_weight: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct SubjectConfig {
    /// K: maximum entries in a subject vector.
    pub top_k: usize,
    /// M: maximum terms per trained class profile.
    pub profile_terms: usize,
}

impl Default for SubjectConfig {
    fn default() -> Self {
        SubjectConfig {
            top_k: 6,
            profile_terms: 100,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct AlertConfig {
    /// ρ: ratio over the 14-day mean that triggers an alert.
    pub rho: f64,
    /// Absolute floor: adjusted 24h count must reach max(c_min, ρ·μ).
    pub c_min: f64,
    /// Weekday factors never drop below this during estimation.
    pub factor_floor: f64,
    /// Days of history required before alerts fire.
    pub min_history_days: usize,
    /// Ratio buckets for alert levels on ranking displays.
    pub level_buckets: Vec<f64>,
    /// Horizon (days) for nightly weekday-factor re-estimation.
    pub weekday_horizon_days: usize,
}

impl Default for AlertConfig {
    fn default() -> Self {
        AlertConfig {
            rho: 2.0,
            c_min: 5.0,
            factor_floor: 0.25,
            min_history_days: 7,
            level_buckets: vec![2.0, 4.0, 8.0],
            weekday_horizon_days: 56,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct GeoConfig {
    /// Score added when a candidate's country matches the source country or
    /// the country of an unambiguous mention in the same text.
    pub country_bonus: f64,
    /// Scores by size class: capital, major-city, city, town.
    pub size_class_scores: [f64; 4],
    /// Score added to the candidate closest to an unambiguous place.
    pub distance_bonus: f64,
    /// Per-level weight for crediting hierarchy ancestors in
    /// major-location selection.
    pub hierarchy_credit: f64,
}

impl Default for GeoConfig {
    fn default() -> Self {
        GeoConfig {
            country_bonus: 3.0,
            size_class_scores: [3.0, 2.0, 1.0, 0.0],
            distance_bonus: 2.0,
            hierarchy_credit: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct QuoteConfig {
    /// Opening/closing quote-mark pairs, e.g. ["«", "»"].
    pub pairs: Vec<(String, String)>,
    /// Maximum length (Unicode scalars) of the optional insert between the
    /// speaker name and the reporting verb, commas excluded.
    pub max_insert_chars: usize,
}

impl Default for QuoteConfig {
    fn default() -> Self {
        QuoteConfig {
            pairs: vec![
                ("«".into(), "»".into()),
                ("‹".into(), "›".into()),
                ("“".into(), "”".into()),
                ("‘".into(), "’".into()),
                ("„".into(), "“".into()),
                ("\"".into(), "\"".into()),
                ("'".into(), "'".into()),
                ("<<".into(), ">>".into()),
            ],
            max_insert_chars: 60,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: Config = toml::from_str(&raw)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        // A relative data_dir is resolved against the config file location.
        if config.data_dir.is_relative() {
            if let Some(parent) = path.parent() {
                config.data_dir = parent.join(&config.data_dir);
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(msg.to_string()))
            }
        };
        check(
            (0.0..=1.0).contains(&self.cluster.theta),
            "cluster.theta must be in [0,1]",
        )?;
        check(self.cluster.window_minutes >= 1, "cluster.window_minutes must be >= 1")?;
        check(self.cluster.cadence_minutes >= 1, "cluster.cadence_minutes must be >= 1")?;
        check(
            (0.0..=1.0).contains(&self.linking.tau_link),
            "linking.tau_link must be in [0,1]",
        )?;
        check(
            (0.0..=1.0).contains(&self.names.tau_name),
            "names.tau_name must be in [0,1]",
        )?;
        check(
            (0.0..=1.0).contains(&self.names.surface_weight),
            "names.surface_weight must be in [0,1]",
        )?;
        check(self.subject.top_k >= 1, "subject.top_k must be >= 1")?;
        check(self.subject.profile_terms >= 1, "subject.profile_terms must be >= 1")?;
        check(self.alerts.rho > 0.0, "alerts.rho must be > 0")?;
        check(self.alerts.c_min >= 0.0, "alerts.c_min must be >= 0")?;
        check(self.alerts.factor_floor > 0.0, "alerts.factor_floor must be > 0")?;
        check(self.breaking.rise_factor > 0.0, "breaking.rise_factor must be > 0")?;
        check(
            !self.quotes.pairs.is_empty(),
            "quotes.pairs must not be empty",
        )?;
        check(
            self.quotes
                .pairs
                .iter()
                .all(|(o, c)| !o.is_empty() && !c.is_empty()),
            "quote marks must be nonempty",
        )?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_match_shipped_constants() {
        let c = Config::default();
        c.validate().unwrap();
        assert_eq!(c.cluster.theta, 0.5);
        assert_eq!(c.cluster.window_minutes, 240);
        assert_eq!(c.cluster.cadence_minutes, 10);
        assert_eq!(c.breaking.min_articles, 10);
        assert_eq!(c.breaking.min_sources, 5);
        assert_eq!(c.breaking.rise_factor, 4.0);
        assert_eq!(c.linking.tau_link, 0.5);
        assert_eq!(c.names.tau_name, 0.85);
        assert_eq!(c.subject.top_k, 6);
        assert_eq!(c.subject.profile_terms, 100);
        assert_eq!(c.alerts.rho, 2.0);
        assert_eq!(c.alerts.c_min, 5.0);
    }

    #[test]
    fn toml_overlay() {
        let parsed: Config = toml::from_str(
            r#"
            data_dir = "elsewhere"
            [cluster]
            theta = 0.35
            [alerts]
            rho = 3.0
            "#,
        )
        .unwrap();
        assert_eq!(parsed.cluster.theta, 0.35);
        assert_eq!(parsed.alerts.rho, 3.0);
        // Untouched sections keep defaults.
        assert_eq!(parsed.names.tau_name, 0.85);
    }

    #[test]
    fn invalid_theta_rejected() {
        let mut c = Config::default();
        c.cluster.theta = 1.5;
        assert!(c.validate().is_err());
    }
}
