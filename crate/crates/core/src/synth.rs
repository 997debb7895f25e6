//! Deterministic synthetic dataset generator.
//!
//! Produces MovieLens-shaped datasets (genre tags, gender/age/occupation
//! profiles, optional directed social edges) with clustered tastes: users
//! belong to latent taste clusters, clusters prefer a few genres, and
//! profile attributes correlate with cluster membership. Used for
//! benchmarks and end-to-end tests when no real dataset is on disk.

use std::collections::{BTreeMap, BTreeSet};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{DataError, Dataset, Rating};

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub users: usize,
    pub items: usize,
    /// Target rating count; the realized count can be slightly lower after
    /// de-duplication.
    pub ratings: usize,
    pub genres: usize,
    /// Latent taste clusters.
    pub clusters: usize,
    /// Probability that a rating lands on an item of a preferred genre.
    pub affinity: f64,
    /// Directed social edges to draw, biased toward same-cluster pairs.
    pub social_edges: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            users: 943,
            items: 1682,
            ratings: 100_000,
            genres: 19,
            clusters: 6,
            affinity: 0.75,
            social_edges: 0,
            seed: 17,
        }
    }
}

const OCCUPATIONS: usize = 12;
const AGE_BUCKETS: usize = 7;

/// Generates a clustered synthetic dataset. Deterministic in the config.
pub fn generate(config: &SynthConfig) -> Result<Dataset, DataError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let genres = config.genres.max(1);
    let clusters = config.clusters.max(1);

    // Items: 1-2 genres each, popularity follows a long-tail weight.
    let mut item_tags: BTreeMap<u32, Vec<u16>> = BTreeMap::new();
    let mut items_of_genre: Vec<Vec<u32>> = vec![Vec::new(); genres];
    for idx in 0..config.items {
        let item = idx as u32 + 1;
        let primary = rng.gen_range(0..genres);
        let mut tags = vec![primary as u16];
        if rng.gen_bool(0.35) {
            let secondary = rng.gen_range(0..genres);
            if secondary != primary {
                tags.push(secondary as u16);
            }
        }
        tags.sort_unstable();
        for &t in &tags {
            items_of_genre[t as usize].push(item);
        }
        item_tags.insert(item, tags);
    }
    let popularity_weight = |item: u32| 1.0 / ((item as f64) + 30.0).powf(0.8);

    // Profiles: occupation pins the cluster, age and gender are weakly
    // correlated with it.
    let mut profile_names = vec!["gender:M".to_string(), "gender:F".to_string()];
    for b in 0..AGE_BUCKETS {
        profile_names.push(format!("age:bucket{b}"));
    }
    for o in 0..OCCUPATIONS {
        profile_names.push(format!("occupation:occ{o}"));
    }
    let mut user_profiles: BTreeMap<u32, Vec<u16>> = BTreeMap::new();
    let mut cluster_of: BTreeMap<u32, usize> = BTreeMap::new();
    for idx in 0..config.users {
        let user = idx as u32 + 1;
        let occupation = rng.gen_range(0..OCCUPATIONS);
        let cluster = occupation % clusters;
        let age = if rng.gen_bool(0.6) {
            cluster % AGE_BUCKETS
        } else {
            rng.gen_range(0..AGE_BUCKETS)
        };
        let gender = rng.gen_range(0..2usize);
        user_profiles.insert(
            user,
            vec![
                gender as u16,
                (2 + age) as u16,
                (2 + AGE_BUCKETS + occupation) as u16,
            ],
        );
        cluster_of.insert(user, cluster);
    }

    // Cluster -> preferred genres.
    let preferred: Vec<Vec<usize>> = (0..clusters)
        .map(|c| (0..3).map(|j| (3 * c + j) % genres).collect())
        .collect();

    // Ratings-per-user long tail.
    let per_user_target: Vec<usize> = (0..config.users)
        .map(|_| {
            let z: f64 = rng.sample(rand::distributions::Open01);
            let base = config.ratings as f64 / config.users as f64;
            ((base * 0.3 / (1.0 - 0.92 * z) * 0.5).round() as usize)
                .clamp(15, config.items / 2)
        })
        .collect();
    let scale = config.ratings as f64 / per_user_target.iter().sum::<usize>() as f64;

    let all_items: Vec<u32> = (1..=config.items as u32).collect();
    let all_weights: Vec<f64> = all_items.iter().map(|&i| popularity_weight(i)).collect();
    let all_dist = WeightedIndex::new(&all_weights).unwrap();
    let genre_dists: Vec<Option<WeightedIndex<f64>>> = items_of_genre
        .iter()
        .map(|items| {
            if items.is_empty() {
                None
            } else {
                Some(
                    WeightedIndex::new(items.iter().map(|&i| popularity_weight(i)).collect::<Vec<_>>())
                        .unwrap(),
                )
            }
        })
        .collect();

    let mut ratings = Vec::with_capacity(config.ratings);
    for (idx, &raw_target) in per_user_target.iter().enumerate().take(config.users) {
        let user = idx as u32 + 1;
        let cluster = cluster_of[&user];
        let target = ((raw_target as f64 * scale).round() as usize).max(10);
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        let mut attempts = 0;
        while seen.len() < target && attempts < target * 8 {
            attempts += 1;
            let liked_genre = rng.gen_bool(config.affinity);
            let item = if liked_genre {
                let genre = preferred[cluster][rng.gen_range(0..preferred[cluster].len())];
                match &genre_dists[genre] {
                    Some(dist) => items_of_genre[genre][dist.sample(&mut rng)],
                    None => all_items[all_dist.sample(&mut rng)],
                }
            } else {
                all_items[all_dist.sample(&mut rng)]
            };
            if !seen.insert(item) {
                continue;
            }
            let tags = &item_tags[&item];
            let is_preferred = tags
                .iter()
                .any(|&t| preferred[cluster].contains(&(t as usize)));
            let value = if is_preferred {
                match rng.gen_range(0..100) {
                    0..=44 => 5.0,
                    45..=84 => 4.0,
                    _ => 3.0,
                }
            } else {
                match rng.gen_range(0..100) {
                    0..=19 => 1.0,
                    20..=54 => 2.0,
                    55..=84 => 3.0,
                    85..=96 => 4.0,
                    _ => 5.0,
                }
            };
            ratings.push(Rating { user, item, value });
        }
    }

    // Social edges with homophily: most stay within the cluster.
    let mut social: BTreeSet<(u32, u32)> = BTreeSet::new();
    if config.social_edges > 0 && config.users > 1 {
        let mut by_cluster: Vec<Vec<u32>> = vec![Vec::new(); clusters];
        for (&user, &c) in &cluster_of {
            by_cluster[c].push(user);
        }
        let users: Vec<u32> = (1..=config.users as u32).collect();
        let mut attempts = 0;
        while social.len() < config.social_edges && attempts < config.social_edges * 10 {
            attempts += 1;
            let from = *users.choose(&mut rng).unwrap();
            let pool = if rng.gen_bool(0.8) {
                &by_cluster[cluster_of[&from]]
            } else {
                &users
            };
            let to = *pool.choose(&mut rng).unwrap();
            if from != to {
                social.insert((from, to));
            }
        }
    }

    Dataset::new(
        ratings,
        (0..genres).map(|g| format!("genre{g}")).collect(),
        item_tags,
        profile_names,
        user_profiles,
        social.into_iter().collect(),
    )
}
