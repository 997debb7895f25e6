//! Dataset loading and splitting.
//!
//! A [`Dataset`] bundles the rating matrix with the side information the
//! recommendation graph is built from: per-item binary tags, per-user binary
//! profile categories, and a directed social edge list. Loaders are provided
//! for the MovieLens 100k file layout and Epinions-style rating/trust dumps,
//! plus warm k-fold and cold-start split protocols.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Lower bound of the rating scale.
pub const RATING_MIN: f64 = 1.0;
/// Upper bound of the rating scale.
pub const RATING_MAX: f64 = 5.0;

/// MovieLens 100k genre names, in flag order of the item file.
pub const ML_GENRES: [&str; 19] = [
    "unknown",
    "Action",
    "Adventure",
    "Animation",
    "Children's",
    "Comedy",
    "Crime",
    "Documentary",
    "Drama",
    "Fantasy",
    "Film-Noir",
    "Horror",
    "Musical",
    "Mystery",
    "Romance",
    "Sci-Fi",
    "Thriller",
    "War",
    "Western",
];

/// Age bucket upper bounds for MovieLens profile binarization.
/// Buckets: <18, 18-24, 25-34, 35-44, 45-49, 50-55, >=56.
const AGE_BUCKETS: [(&str, u32); 7] = [
    ("age:<18", 18),
    ("age:18-24", 25),
    ("age:25-34", 35),
    ("age:35-44", 45),
    ("age:45-49", 50),
    ("age:50-55", 56),
    ("age:>=56", u32::MAX),
];

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{file}:{line}: {msg}")]
    Malformed {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("duplicate rating for user {user} on item {item}")]
    DuplicateRating { user: u32, item: u32 },
    #[error("rating {value} out of range [{RATING_MIN}, {RATING_MAX}]")]
    RatingOutOfRange { value: f64 },
    #[error("dataset has no ratings")]
    EmptyRatings,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One rating record: user `user` gave item `item` the score `value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rating {
    pub user: u32,
    pub item: u32,
    pub value: f64,
}

/// Ratings plus side information, immutable after construction.
///
/// `users` and `items` are sorted and contain every id referenced anywhere in
/// the dataset, including users that only appear in profiles or social edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    ratings: Vec<Rating>,
    users: Vec<u32>,
    items: Vec<u32>,
    tag_names: Vec<String>,
    item_tags: BTreeMap<u32, Vec<u16>>,
    profile_names: Vec<String>,
    user_profiles: BTreeMap<u32, Vec<u16>>,
    social: Vec<(u32, u32)>,
}

impl Dataset {
    /// Validates and canonicalizes the parts into a `Dataset`.
    ///
    /// Ratings are sorted by (user, item); duplicates and out-of-range values
    /// are rejected, as are tag/profile/social references to unknown ids.
    pub fn new(
        mut ratings: Vec<Rating>,
        tag_names: Vec<String>,
        item_tags: BTreeMap<u32, Vec<u16>>,
        profile_names: Vec<String>,
        user_profiles: BTreeMap<u32, Vec<u16>>,
        mut social: Vec<(u32, u32)>,
    ) -> Result<Self, DataError> {
        for r in &ratings {
            if !(RATING_MIN..=RATING_MAX).contains(&r.value) {
                return Err(DataError::RatingOutOfRange { value: r.value });
            }
        }
        ratings.sort_by_key(|a| (a.user, a.item));
        for pair in ratings.windows(2) {
            if pair[0].user == pair[1].user && pair[0].item == pair[1].item {
                return Err(DataError::DuplicateRating {
                    user: pair[0].user,
                    item: pair[0].item,
                });
            }
        }

        let mut users: BTreeSet<u32> = ratings.iter().map(|r| r.user).collect();
        users.extend(user_profiles.keys().copied());
        users.extend(social.iter().flat_map(|&(a, b)| [a, b]));
        let mut items: BTreeSet<u32> = ratings.iter().map(|r| r.item).collect();
        items.extend(item_tags.keys().copied());

        for (item, tags) in &item_tags {
            for &t in tags {
                if t as usize >= tag_names.len() {
                    return Err(DataError::Invalid(format!(
                        "item {item} references unknown tag index {t}"
                    )));
                }
            }
        }
        for (user, cats) in &user_profiles {
            for &p in cats {
                if p as usize >= profile_names.len() {
                    return Err(DataError::Invalid(format!(
                        "user {user} references unknown profile index {p}"
                    )));
                }
            }
        }

        social.sort_unstable();
        social.dedup();
        if social.iter().any(|&(a, b)| a == b) {
            return Err(DataError::Invalid("social self-loop".into()));
        }

        Ok(Self {
            ratings,
            users: users.into_iter().collect(),
            items: items.into_iter().collect(),
            tag_names,
            item_tags,
            profile_names,
            user_profiles,
            social,
        })
    }

    pub fn ratings(&self) -> &[Rating] {
        &self.ratings
    }

    pub fn users(&self) -> &[u32] {
        &self.users
    }

    pub fn items(&self) -> &[u32] {
        &self.items
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    /// Number of tag categories (`k`).
    pub fn num_tags(&self) -> usize {
        self.tag_names.len()
    }

    /// Number of profile categories (`l`).
    pub fn num_profiles(&self) -> usize {
        self.profile_names.len()
    }

    pub fn tag_names(&self) -> &[String] {
        &self.tag_names
    }

    pub fn profile_names(&self) -> &[String] {
        &self.profile_names
    }

    pub fn item_tags(&self, item: u32) -> &[u16] {
        self.item_tags.get(&item).map_or(&[], Vec::as_slice)
    }

    pub fn user_profile(&self, user: u32) -> &[u16] {
        self.user_profiles.get(&user).map_or(&[], Vec::as_slice)
    }

    pub fn social(&self) -> &[(u32, u32)] {
        &self.social
    }

    /// Ratings of one user, sorted by item id.
    pub fn user_ratings(&self, user: u32) -> &[Rating] {
        let lo = self.ratings.partition_point(|r| r.user < user);
        let hi = self.ratings.partition_point(|r| r.user <= user);
        &self.ratings[lo..hi]
    }

    /// Mean rating of one user, if they have any ratings.
    pub fn user_mean(&self, user: u32) -> Option<f64> {
        let rs = self.user_ratings(user);
        if rs.is_empty() {
            None
        } else {
            Some(rs.iter().map(|r| r.value).sum::<f64>() / rs.len() as f64)
        }
    }

    /// Mean over all ratings in the dataset.
    pub fn global_mean(&self) -> f64 {
        if self.ratings.is_empty() {
            return 0.0;
        }
        self.ratings.iter().map(|r| r.value).sum::<f64>() / self.ratings.len() as f64
    }

    /// All ratings on one item as (user, value, user's mean).
    pub fn item_raters(&self, item: u32) -> Vec<(u32, f64)> {
        self.ratings
            .iter()
            .filter(|r| r.item == item)
            .map(|r| (r.user, r.value))
            .collect()
    }

    /// Items ordered by training rating count descending, ties by ascending id.
    pub fn items_by_popularity(&self) -> Vec<u32> {
        let mut counts: BTreeMap<u32, usize> = self.items.iter().map(|&i| (i, 0)).collect();
        for r in &self.ratings {
            *counts.get_mut(&r.item).unwrap() += 1;
        }
        let mut items: Vec<u32> = self.items.clone();
        items.sort_by_key(|i| (std::cmp::Reverse(counts[i]), *i));
        items
    }

    /// Writes the canonical TSV dump. Line types: `tag`, `profile`, `user`,
    /// `item`, `itemtag`, `userprofile`, `rating`, `social`.
    pub fn dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (idx, name) in self.tag_names.iter().enumerate() {
            writeln!(out, "tag\t{idx}\t{name}")?;
        }
        for (idx, name) in self.profile_names.iter().enumerate() {
            writeln!(out, "profile\t{idx}\t{name}")?;
        }
        for u in &self.users {
            writeln!(out, "user\t{u}")?;
        }
        for i in &self.items {
            writeln!(out, "item\t{i}")?;
        }
        for (item, tags) in &self.item_tags {
            for t in tags {
                writeln!(out, "itemtag\t{item}\t{t}")?;
            }
        }
        for (user, cats) in &self.user_profiles {
            for p in cats {
                writeln!(out, "userprofile\t{user}\t{p}")?;
            }
        }
        for r in &self.ratings {
            writeln!(out, "rating\t{}\t{}\t{}", r.user, r.item, r.value)?;
        }
        for (a, b) in &self.social {
            writeln!(out, "social\t{a}\t{b}")?;
        }
        Ok(())
    }

    /// Reads a dataset back from the canonical TSV dump.
    pub fn load_dump(path: &Path) -> Result<Self, DataError> {
        let file = path.display().to_string();
        let reader = BufReader::new(File::open(path)?);
        let mut ratings = Vec::new();
        let mut tag_names: Vec<(usize, String)> = Vec::new();
        let mut profile_names: Vec<(usize, String)> = Vec::new();
        let mut item_tags: BTreeMap<u32, Vec<u16>> = BTreeMap::new();
        let mut user_profiles: BTreeMap<u32, Vec<u16>> = BTreeMap::new();
        let mut social = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| DataError::Malformed {
                file: file.clone(),
                line: lineno + 1,
                msg: msg.into(),
            };
            let fields: Vec<&str> = line.split('\t').collect();
            match fields[0] {
                "tag" | "profile" if fields.len() == 3 => {
                    let idx = fields[1].parse().map_err(|_| err("bad index"))?;
                    let dst = if fields[0] == "tag" {
                        &mut tag_names
                    } else {
                        &mut profile_names
                    };
                    dst.push((idx, fields[2].to_string()));
                }
                "user" | "item" if fields.len() == 2 => {
                    fields[1].parse::<u32>().map_err(|_| err("bad id"))?;
                    // membership is implied by the referencing lines
                }
                "itemtag" if fields.len() == 3 => {
                    let item = fields[1].parse().map_err(|_| err("bad item id"))?;
                    let tag = fields[2].parse().map_err(|_| err("bad tag index"))?;
                    item_tags.entry(item).or_default().push(tag);
                }
                "userprofile" if fields.len() == 3 => {
                    let user = fields[1].parse().map_err(|_| err("bad user id"))?;
                    let cat = fields[2].parse().map_err(|_| err("bad profile index"))?;
                    user_profiles.entry(user).or_default().push(cat);
                }
                "rating" if fields.len() == 4 => ratings.push(Rating {
                    user: fields[1].parse().map_err(|_| err("bad user id"))?,
                    item: fields[2].parse().map_err(|_| err("bad item id"))?,
                    value: fields[3].parse().map_err(|_| err("bad rating value"))?,
                }),
                "social" if fields.len() == 3 => social.push((
                    fields[1].parse().map_err(|_| err("bad user id"))?,
                    fields[2].parse().map_err(|_| err("bad user id"))?,
                )),
                _ => return Err(err("unrecognized line")),
            }
        }
        tag_names.sort();
        profile_names.sort();
        Self::new(
            ratings,
            tag_names.into_iter().map(|(_, n)| n).collect(),
            item_tags,
            profile_names.into_iter().map(|(_, n)| n).collect(),
            user_profiles,
            social,
        )
    }
}

/// Which split protocol produced a [`Split`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitMode {
    WarmFold(usize),
    ColdStart,
}

/// A train/test partition of a dataset's ratings.
///
/// Side information (tags, profiles, social edges) always stays in `train`;
/// only rating records move to `test`.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Dataset,
    pub test: Vec<Rating>,
    pub mode: SplitMode,
    pub seed: u64,
}

impl Split {
    /// Users that appear in the test set.
    pub fn test_users(&self) -> BTreeSet<u32> {
        self.test.iter().map(|r| r.user).collect()
    }
}

fn dataset_without_ratings(base: &Dataset, removed: &BTreeSet<usize>) -> Dataset {
    let train_ratings: Vec<Rating> = base
        .ratings
        .iter()
        .enumerate()
        .filter(|(idx, _)| !removed.contains(idx))
        .map(|(_, r)| *r)
        .collect();
    let mut train = base.clone();
    train.ratings = train_ratings;
    train
}

/// Partitions the ratings into `folds` disjoint test folds, uniformly at
/// random under `seed`. Each returned split holds one fold out as test.
pub fn split_warm(dataset: &Dataset, folds: usize, seed: u64) -> Result<Vec<Split>, DataError> {
    if folds < 2 {
        return Err(DataError::Invalid(format!("folds must be >= 2, got {folds}")));
    }
    if folds > dataset.ratings.len() {
        return Err(DataError::Invalid(format!(
            "folds ({folds}) exceeds rating count ({})",
            dataset.ratings.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..dataset.ratings.len()).collect();
    order.shuffle(&mut rng);

    let mut splits = Vec::with_capacity(folds);
    for fold in 0..folds {
        let test_idx: BTreeSet<usize> = order
            .iter()
            .copied()
            .skip(fold)
            .step_by(folds)
            .collect();
        let test = test_idx.iter().map(|&i| dataset.ratings[i]).collect();
        splits.push(Split {
            train: dataset_without_ratings(dataset, &test_idx),
            test,
            mode: SplitMode::WarmFold(fold),
            seed,
        });
    }
    Ok(splits)
}

/// Moves all ratings of a random `fraction` of users into the test set.
///
/// Cold users keep their profile vectors and social edges in train; the cold
/// user count is `max(1, floor(fraction * m))`.
pub fn split_cold(dataset: &Dataset, fraction: f64, seed: u64) -> Result<Split, DataError> {
    if dataset.ratings.is_empty() {
        return Err(DataError::EmptyRatings);
    }
    if !(0.0..1.0).contains(&fraction) || fraction <= 0.0 {
        return Err(DataError::Invalid(format!(
            "cold fraction must be in (0, 1), got {fraction}"
        )));
    }
    let count = ((fraction * dataset.users.len() as f64).floor() as usize).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut users = dataset.users.clone();
    users.shuffle(&mut rng);
    let cold: BTreeSet<u32> = users.into_iter().take(count).collect();

    let test_idx: BTreeSet<usize> = dataset
        .ratings
        .iter()
        .enumerate()
        .filter(|(_, r)| cold.contains(&r.user))
        .map(|(idx, _)| idx)
        .collect();
    let test = test_idx.iter().map(|&i| dataset.ratings[i]).collect();
    Ok(Split {
        train: dataset_without_ratings(dataset, &test_idx),
        test,
        mode: SplitMode::ColdStart,
        seed,
    })
}

fn parse_field<T: std::str::FromStr>(
    field: &str,
    file: &str,
    line: usize,
    what: &str,
) -> Result<T, DataError> {
    field.parse().map_err(|_| DataError::Malformed {
        file: file.into(),
        line,
        msg: format!("bad {what}: {field:?}"),
    })
}

/// Loads a MovieLens 100k layout directory (`u.data`, `u.item`, `u.user`).
///
/// Genre flags become the 19-tag universe; user profiles are binarized into
/// gender, age-bucket, and per-occupation categories. Timestamps are dropped.
pub fn load_movielens(dir: &Path) -> Result<Dataset, DataError> {
    let ratings_path = dir.join("u.data");
    let file = ratings_path.display().to_string();
    let mut ratings = Vec::new();
    for (lineno, line) in BufReader::new(File::open(&ratings_path)?).lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(DataError::Malformed {
                file: file.clone(),
                line: lineno + 1,
                msg: format!("expected 4 tab-separated fields, got {}", fields.len()),
            });
        }
        ratings.push(Rating {
            user: parse_field(fields[0], &file, lineno + 1, "user id")?,
            item: parse_field(fields[1], &file, lineno + 1, "item id")?,
            value: parse_field::<f64>(fields[2], &file, lineno + 1, "rating")?,
        });
    }
    if ratings.is_empty() {
        return Err(DataError::EmptyRatings);
    }

    let items_path = dir.join("u.item");
    let file = items_path.display().to_string();
    let mut item_tags: BTreeMap<u32, Vec<u16>> = BTreeMap::new();
    for (lineno, line) in read_latin1_lines(&items_path)?.into_iter().enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('|').collect();
        if fields.len() < ML_GENRES.len() + 1 {
            return Err(DataError::Malformed {
                file: file.clone(),
                line: lineno + 1,
                msg: "too few pipe-separated fields for an item record".into(),
            });
        }
        let item: u32 = parse_field(fields[0], &file, lineno + 1, "item id")?;
        let flags = &fields[fields.len() - ML_GENRES.len()..];
        let mut tags = Vec::new();
        for (idx, flag) in flags.iter().enumerate() {
            match *flag {
                "0" => {}
                "1" => tags.push(idx as u16),
                other => {
                    return Err(DataError::Malformed {
                        file: file.clone(),
                        line: lineno + 1,
                        msg: format!("genre flag must be 0 or 1, got {other:?}"),
                    })
                }
            }
        }
        item_tags.insert(item, tags);
    }

    let users_path = dir.join("u.user");
    let file = users_path.display().to_string();
    let mut raw_users: Vec<(u32, u32, String, String)> = Vec::new();
    for (lineno, line) in BufReader::new(File::open(&users_path)?).lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('|').collect();
        if fields.len() != 5 {
            return Err(DataError::Malformed {
                file: file.clone(),
                line: lineno + 1,
                msg: format!("expected 5 pipe-separated fields, got {}", fields.len()),
            });
        }
        raw_users.push((
            parse_field(fields[0], &file, lineno + 1, "user id")?,
            parse_field(fields[1], &file, lineno + 1, "age")?,
            fields[2].to_string(),
            fields[3].to_string(),
        ));
    }

    // Profile universe: gender, then age buckets, then occupations sorted.
    let mut profile_names = vec!["gender:M".to_string(), "gender:F".to_string()];
    profile_names.extend(AGE_BUCKETS.iter().map(|(name, _)| name.to_string()));
    let occupations: BTreeSet<&str> = raw_users.iter().map(|(_, _, _, occ)| occ.as_str()).collect();
    let occ_base = profile_names.len();
    let occ_index: BTreeMap<&str, usize> = occupations
        .iter()
        .enumerate()
        .map(|(idx, &occ)| (occ, occ_base + idx))
        .collect();
    profile_names.extend(occupations.iter().map(|occ| format!("occupation:{occ}")));

    let mut user_profiles: BTreeMap<u32, Vec<u16>> = BTreeMap::new();
    for (user, age, gender, occupation) in &raw_users {
        let mut cats = Vec::with_capacity(3);
        cats.push(if gender == "F" { 1 } else { 0 });
        let bucket = AGE_BUCKETS.iter().position(|&(_, hi)| *age < hi).unwrap();
        cats.push((2 + bucket) as u16);
        cats.push(occ_index[occupation.as_str()] as u16);
        user_profiles.insert(*user, cats);
    }

    Dataset::new(
        ratings,
        ML_GENRES.iter().map(|g| g.to_string()).collect(),
        item_tags,
        profile_names,
        user_profiles,
        Vec::new(),
    )
}

// u.item titles are Latin-1; decode bytes losslessly instead of failing on
// non-UTF-8 lines.
fn read_latin1_lines(path: &Path) -> Result<Vec<String>, DataError> {
    let bytes = std::fs::read(path)?;
    Ok(bytes
        .split(|&b| b == b'\n')
        .map(|line| {
            line.iter()
                .filter(|&&b| b != b'\r')
                .map(|&b| b as char)
                .collect()
        })
        .collect())
}

/// Result of [`load_epinions`]: the dataset plus the number of trust edges
/// that referenced users without any ratings and were dropped.
pub struct EpinionsLoad {
    pub dataset: Dataset,
    pub dropped_trust_edges: usize,
}

/// Loads Epinions-style whitespace-separated rating and trust files.
///
/// The tag and profile universes are empty; trust edges are kept directed.
pub fn load_epinions(ratings_path: &Path, trust_path: &Path) -> Result<EpinionsLoad, DataError> {
    let file = ratings_path.display().to_string();
    let mut ratings = Vec::new();
    for (lineno, line) in BufReader::new(File::open(ratings_path)?).lines().enumerate() {
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() < 3 {
            return Err(DataError::Malformed {
                file: file.clone(),
                line: lineno + 1,
                msg: format!("expected user item rating, got {} fields", fields.len()),
            });
        }
        ratings.push(Rating {
            user: parse_field(fields[0], &file, lineno + 1, "user id")?,
            item: parse_field(fields[1], &file, lineno + 1, "item id")?,
            value: parse_field::<f64>(fields[2], &file, lineno + 1, "rating")?,
        });
    }
    if ratings.is_empty() {
        return Err(DataError::EmptyRatings);
    }
    let known_users: BTreeSet<u32> = ratings.iter().map(|r| r.user).collect();

    let file = trust_path.display().to_string();
    let mut social = Vec::new();
    let mut dropped = 0usize;
    for (lineno, line) in BufReader::new(File::open(trust_path)?).lines().enumerate() {
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() < 2 {
            return Err(DataError::Malformed {
                file: file.clone(),
                line: lineno + 1,
                msg: "expected truster trustee".into(),
            });
        }
        let from: u32 = parse_field(fields[0], &file, lineno + 1, "user id")?;
        let to: u32 = parse_field(fields[1], &file, lineno + 1, "user id")?;
        if from == to {
            dropped += 1;
            continue;
        }
        if known_users.contains(&from) && known_users.contains(&to) {
            social.push((from, to));
        } else {
            dropped += 1;
        }
    }

    let dataset = Dataset::new(
        ratings,
        Vec::new(),
        BTreeMap::new(),
        Vec::new(),
        BTreeMap::new(),
        social,
    )?;
    Ok(EpinionsLoad {
        dataset,
        dropped_trust_edges: dropped,
    })
}

/// Seeded random subsample to `max_users` users and `max_items` items,
/// keeping only ratings and social edges internal to the selection.
pub fn subsample(
    dataset: &Dataset,
    max_users: usize,
    max_items: usize,
    seed: u64,
) -> Result<Dataset, DataError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut users = dataset.users.clone();
    users.shuffle(&mut rng);
    let keep_users: BTreeSet<u32> = users.into_iter().take(max_users).collect();
    let mut items = dataset.items.clone();
    items.shuffle(&mut rng);
    let keep_items: BTreeSet<u32> = items.into_iter().take(max_items).collect();

    let ratings: Vec<Rating> = dataset
        .ratings
        .iter()
        .filter(|r| keep_users.contains(&r.user) && keep_items.contains(&r.item))
        .copied()
        .collect();
    if ratings.is_empty() {
        return Err(DataError::EmptyRatings);
    }
    let social: Vec<(u32, u32)> = dataset
        .social
        .iter()
        .filter(|(a, b)| keep_users.contains(a) && keep_users.contains(b))
        .copied()
        .collect();
    let item_tags = dataset
        .item_tags
        .iter()
        .filter(|(i, _)| keep_items.contains(i))
        .map(|(i, t)| (*i, t.clone()))
        .collect();
    let user_profiles = dataset
        .user_profiles
        .iter()
        .filter(|(u, _)| keep_users.contains(u))
        .map(|(u, p)| (*u, p.clone()))
        .collect();
    Dataset::new(
        ratings,
        dataset.tag_names.clone(),
        item_tags,
        dataset.profile_names.clone(),
        user_profiles,
        social,
    )
}
