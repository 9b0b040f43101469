#![allow(dead_code)]

use std::path::{Path, PathBuf};

use dcbpv::source::{parse_src_program, SrcProgram};
use dcbpv::surface::{parse, ProgramFile};
use dcbpv::syntax::{CType, Comp, Effect};
use dcbpv::typecheck::{CheckOptions, Variant};

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn files(sub: &str, ext: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(corpus_dir().join(sub))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == ext))
        .collect();
    v.sort();
    v
}

pub struct Program {
    pub name: String,
    pub file: ProgramFile,
    pub variant: Variant,
    pub ty: CType,
    pub main: Comp,
}

impl Program {
    pub fn opts(&self) -> CheckOptions {
        CheckOptions::new(self.variant, &self.file.signature)
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.file.pragmas.iter().any(|p| p.trim() == flag)
    }

    /// No divergence or recursion anywhere in the program.
    pub fn terminating(&self) -> bool {
        let used = self.main.effects_used();
        !used.contains(&Effect::Diverge) && !used.contains(&Effect::Rec)
    }
}

pub fn programs() -> Vec<Program> {
    files("programs", "dcbpv")
        .into_iter()
        .map(|path| {
            let text = std::fs::read_to_string(&path).unwrap();
            let file = parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            let variant = file.pragma("variant").and_then(Variant::from_name).unwrap_or(Variant::Minus);
            let main = file.main.clone().unwrap_or_else(|| panic!("{}: no main", path.display()));
            Program {
                name: path.file_stem().unwrap().to_string_lossy().into_owned(),
                file,
                variant,
                ty: main.ty,
                main: main.body,
            }
        })
        .collect()
}

pub struct Source {
    pub name: String,
    pub text: String,
    pub program: SrcProgram,
    pub pragmas: Vec<String>,
}

impl Source {
    pub fn pragma(&self, key: &str) -> Option<&str> {
        self.pragmas.iter().find_map(|p| p.strip_prefix(key).map(str::trim))
    }
}

pub fn sources() -> Vec<Source> {
    files("source", "dtt")
        .into_iter()
        .map(|path| {
            let text = std::fs::read_to_string(&path).unwrap();
            let program = parse_src_program(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            let pragmas = text
                .lines()
                .filter_map(|l| l.trim().strip_prefix("--!").map(|p| p.trim().to_string()))
                .collect();
            Source { name: path.file_stem().unwrap().to_string_lossy().into_owned(), text, program, pragmas }
        })
        .collect()
}

pub mod gen;
