//! Census name tables in, lexicon CSV (`name,gender,dominance,rank`) out.

use std::fs;
use std::path::Path;

use keyness_core::genderlex::{Gender, GenderLexicon, LexiconEntry, LexiconError};
use serde::{Deserialize, Serialize};

use crate::error::{csv_err, unreadable, Error, Result};

/// The 1990 US census first-name distribution files, bundled with the crate.
pub const CENSUS_1990_MALE: &str = include_str!("../data/census1990/dist.male.first");
pub const CENSUS_1990_FEMALE: &str = include_str!("../data/census1990/dist.female.first");

/// Lexicon built from the bundled 1990 census tables.
pub fn bundled_lexicon() -> GenderLexicon {
    GenderLexicon::from_census(CENSUS_1990_MALE, CENSUS_1990_FEMALE).expect("bundled census tables parse")
}

pub fn build_from_census_files(male: &Path, female: &Path) -> Result<GenderLexicon> {
    let male_text = fs::read_to_string(male).map_err(unreadable(male))?;
    let female_text = fs::read_to_string(female).map_err(unreadable(female))?;
    let male_rows = keyness_core::genderlex::parse_census_table(&male_text)
        .map_err(|source| Error::Lexicon { path: male.to_path_buf(), source })?;
    let female_rows = keyness_core::genderlex::parse_census_table(&female_text)
        .map_err(|source| Error::Lexicon { path: female.to_path_buf(), source })?;
    Ok(GenderLexicon::build(&male_rows, &female_rows))
}

#[derive(Serialize, Deserialize)]
struct LexiconRow {
    name: String,
    gender: Gender,
    dominance: f64,
    rank: u32,
}

pub fn write_lexicon(path: &Path, lexicon: &GenderLexicon) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    for (name, e) in lexicon.iter() {
        let row =
            LexiconRow { name: name.to_string(), gender: e.gender, dominance: e.dominance, rank: e.popularity_rank };
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| csv_err(path)(e.into()))?;
    Ok(())
}

pub fn read_lexicon(path: &Path) -> Result<GenderLexicon> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut entries = Vec::new();
    for row in r.deserialize() {
        let row: LexiconRow = row.map_err(csv_err(path))?;
        entries
            .push((row.name, LexiconEntry { gender: row.gender, dominance: row.dominance, popularity_rank: row.rank }));
    }
    GenderLexicon::from_entries(entries)
        .map_err(|source: LexiconError| Error::Lexicon { path: path.to_path_buf(), source })
}
