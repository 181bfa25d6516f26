//! Helpers shared by the CLI test targets.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scriptaffect"))
}

/// Runs the binary against the bundled fixture corpus.
pub fn run_fixture(subcommand: &str, out: &Path, extra: &[&str]) -> Output {
    let f = fixtures();
    bin()
        .arg(subcommand)
        .arg("--scripts")
        .arg(f.join("scripts"))
        .arg("--metadata")
        .arg(f.join("metadata.csv"))
        .arg("--lexicon")
        .arg(f.join("lexicon.tsv"))
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("binary runs")
}

pub fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

const JOY: [&str; 8] = ["happy", "delighted", "cheerful", "glad", "joyful", "sunny", "merry", "bliss"];
const ANGER: [&str; 8] = ["furious", "rage", "angry", "livid", "hostile", "wrath", "irate", "fuming"];
// mild second signals so character vectors are not all identical
const TRUST: [&str; 4] = ["loyal", "honest", "faithful", "reliable"];
const FEAR: [&str; 4] = ["afraid", "nervous", "dread", "panic"];
const FEMALE_NOUNS: [&str; 5] = ["kitchen", "dress", "fashion", "skirt", "sweetheart"];
const MALE_NOUNS: [&str; 5] = ["war", "business", "army", "engine", "battle"];
const FILLER: [&str; 10] = ["the", "and", "we", "went", "there", "again", "today", "road", "it", "was"];

const NAMES: [&str; 40] = [
    "ADA", "BELLA", "CORA", "DELIA", "EDNA", "FAYE", "GRETA", "HAZEL", "IRIS", "JUNE", "ABEL",
    "BRUNO", "CYRUS", "DEAN", "EMIL", "FELIX", "GUS", "HUGO", "IVAN", "JUDE", "KARL", "LEON",
    "MILO", "NED", "OTTO", "PAUL", "QUINN", "ROSS", "SETH", "TOBY", "URI", "VANCE", "WADE",
    "XAVI", "YURI", "ZANE", "ARLO", "BORIS", "CLIVE", "DIRK",
];

/// 40 characters over four scripts, 30 male and 10 female. Female lines draw
/// their affect words from joy, male lines from anger. Writes scripts,
/// metadata and lexicon under `root`.
pub fn planted_corpus(root: &Path, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scripts = root.join("scripts");
    std::fs::create_dir_all(&scripts).unwrap();

    let mut lexicon = String::new();
    for (words, affect) in [(&JOY[..], "joy"), (&ANGER[..], "anger"), (&TRUST[..], "trust"), (&FEAR[..], "fear")] {
        for w in words {
            writeln!(lexicon, "{w}\t{affect}\t1").unwrap();
        }
    }
    std::fs::write(root.join("lexicon.tsv"), lexicon).unwrap();

    let mut meta = String::from("movie,character,gender,year\n");
    let (mut next_female, mut next_male) = (0, 10);
    for movie in 0..4 {
        let title = format!("planted{movie}");
        let year = 1990 + movie * 8;
        let mut script = String::from("INT. HOUSE - DAY\n\nPeople talk.\n\n");
        // three women in the first two scripts, two in the others
        let women = if movie < 2 { 3 } else { 2 };
        let mut cast = Vec::new();
        for i in 0..10 {
            if i < women {
                cast.push((NAMES[next_female], true));
                next_female += 1;
            } else {
                cast.push((NAMES[next_male], false));
                next_male += 1;
            }
        }
        for &(name, female) in &cast {
            writeln!(meta, "{title},{name},{},{year}", if female { "female" } else { "male" }).unwrap();
        }
        for round in 0..7 {
            for &(name, female) in &cast {
                let (main, side, nouns) = if female {
                    (&JOY[..], &TRUST[..], &FEMALE_NOUNS[..])
                } else {
                    (&ANGER[..], &FEAR[..], &MALE_NOUNS[..])
                };
                let mut words = Vec::new();
                for _ in 0..rng.random_range(1..4) {
                    words.push(*main.choose(&mut rng).unwrap());
                }
                if rng.random_bool(0.4) {
                    words.push(*side.choose(&mut rng).unwrap());
                }
                words.push(*nouns.choose(&mut rng).unwrap());
                for _ in 0..rng.random_range(2..6) {
                    words.push(*FILLER.choose(&mut rng).unwrap());
                }
                let line = words.join(" ");
                writeln!(script, "{:20}{name}\n{:10}{line}.\n", "", "").unwrap();
            }
            writeln!(script, "The scene shifts, round {round}.\n").unwrap();
        }
        std::fs::write(scripts.join(format!("{title}.txt")), script).unwrap();
    }
    std::fs::write(root.join("metadata.csv"), meta).unwrap();
}
