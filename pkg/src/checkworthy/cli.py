"""Command-line entry point driving the pipeline from a YAML run config.

One command per invocation:

    checkworthy stats     config.yaml   corpus counts per split
    checkworthy featurize config.yaml   raw feature TSVs
    checkworthy train     config.yaml   model file (with standardizer)
    checkworthy rank      config.yaml   per-document ranked sentences
    checkworthy evaluate  config.yaml   MAP / RP / P@5 / P@10 report
    checkworthy ablate    config.yaml   feature-set ablation table
    checkworthy report    config.yaml   top-ranked negatives per document

The config is a flat YAML mapping; relative paths resolve against the
config file's directory, and ``--set key=value`` overrides individual
fields for ad-hoc runs (values parse as YAML, so lists work).  Exit
codes: 0 success, 1 config/validation error, 2 runtime error.
Validation reports every problem it finds, not just the first.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping, Sequence

import yaml

from checkworthy.annotation import (
    AnnotationIndex,
    align_annotations,
    basic_annotate,
    parse_conllu,
)
from checkworthy.corpus import (
    Corpus,
    attach_gold_labels,
    build_corpus,
    corpus_stats,
    load_transcript,
)
from checkworthy.embedding import (
    EmbeddingStore,
    load_embeddings_text,
    load_vocab_restriction,
    restriction_for,
)
from checkworthy.evaluation import (
    ABLATION_MODES,
    PipelineResources,
    ablation_to_tsv,
    format_ablation,
    format_report,
    qualitative_report,
    qualitative_to_tsv,
    rank_by_score,
    report_to_tsv,
    run_ablation,
    run_pipeline,
    score_matrix,
    train_model,
)
from checkworthy.features import (
    CANONICAL_ORDER,
    FeatureContext,
    FeatureGroup,
    assemble_features,
    default_word_list,
    load_word_list,
    matrix_to_tsv,
)
from checkworthy.ranker import TrainConfig, load_model, save_model
from checkworthy.scores import fetch_scores_http, load_scores_tsv
from checkworthy.topics import TopicSet, build_topic_vectors, default_topics, load_topics

COMMANDS = ("stats", "featurize", "train", "rank", "evaluate", "ablate", "report")

_PATH_KEYS = (
    "train_data",
    "test_data",
    "train_gold",
    "test_gold",
    "train_annotations",
    "test_annotations",
    "embeddings",
    "topics",
    "word_list",
    "scores",
)

_GROUPS_NEEDING_POS_TAGS = (FeatureGroup.CS, FeatureGroup.VT, FeatureGroup.POS)


@dataclass
class RunConfig:
    """Declarative description of one run; every field has a usable default."""

    train_data: str | None = None
    test_data: str | None = None
    train_gold: str | None = None
    test_gold: str | None = None
    train_annotations: str | None = None
    test_annotations: str | None = None
    basic_annotation: bool = False
    embeddings: str | None = None
    vocab_restriction: str | None = None
    topics: str | None = None
    word_list: str | None = None
    scores: str | None = None
    score_endpoint: str | None = None
    features: tuple[str, ...] = tuple(g.value for g in CANONICAL_ORDER)
    we_policy: str = "all_words"
    lam: float = 1.0
    tolerance: float = 1e-8
    max_iterations: int = 1000
    seed: int = 0
    ablation_mode: str = "leave_one_out"
    output_dir: str = "out"


class ConfigError(ValueError):
    """The run config failed to parse; problems holds every issue found."""

    def __init__(self, problems: Sequence[str]):
        super().__init__("; ".join(problems))
        self.problems = list(problems)


def _parse_overrides(pairs: Sequence[str]) -> dict:
    overrides = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ConfigError([f"--set expects key=value, got {pair!r}"])
        overrides[key] = yaml.safe_load(value)
    return overrides


def load_config(path: str | Path, overrides: Mapping[str, object] | None = None) -> RunConfig:
    """Read a YAML config, apply overrides, resolve paths, and type-check."""
    path = Path(path)
    problems: list[str] = []
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError([f"cannot read config: {exc}"]) from None
    except yaml.YAMLError as exc:
        raise ConfigError([f"config is not valid YAML: {exc}"]) from None
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError([f"config must be a YAML mapping, got {type(raw).__name__}"])
    raw.update(overrides or {})

    known = {f.name for f in fields(RunConfig)}
    for key in sorted(set(raw) - known):
        problems.append(f"unknown config key {key!r}")

    cfg = RunConfig()
    for f in fields(RunConfig):
        if f.name not in raw:
            continue
        value = raw[f.name]
        if f.name == "features":
            if isinstance(value, str):
                value = [v.strip() for v in value.split(",") if v.strip()]
            if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                problems.append("features must be a list of group names")
                continue
            value = tuple(value)
        elif f.name == "basic_annotation":
            if not isinstance(value, bool):
                problems.append(f"basic_annotation must be true or false, got {value!r}")
                continue
        elif f.name in ("lam", "tolerance"):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                problems.append(f"{f.name} must be a number, got {value!r}")
                continue
            value = float(value)
        elif f.name in ("max_iterations", "seed"):
            if not isinstance(value, int) or isinstance(value, bool):
                problems.append(f"{f.name} must be an integer, got {value!r}")
                continue
        elif value is not None and not isinstance(value, str):
            problems.append(f"{f.name} must be a string, got {value!r}")
            continue
        cfg = replace(cfg, **{f.name: value})

    if problems:
        raise ConfigError(problems)

    base = path.parent
    resolved = {}
    for key in _PATH_KEYS:
        value = getattr(cfg, key)
        if value is not None:
            resolved[key] = str((base / value).resolve()) if not Path(value).is_absolute() else value
    if cfg.vocab_restriction not in (None, "auto"):
        value = cfg.vocab_restriction
        resolved["vocab_restriction"] = (
            str((base / value).resolve()) if not Path(value).is_absolute() else value
        )
    if not Path(cfg.output_dir).is_absolute():
        resolved["output_dir"] = str((base / cfg.output_dir).resolve())
    return replace(cfg, **resolved)


def parse_feature_groups(names: Sequence[str]) -> tuple[FeatureGroup, ...]:
    """Validate group names and return them in canonical order."""
    problems = []
    groups = []
    for name in names:
        try:
            group = FeatureGroup[name]
        except KeyError:
            problems.append(
                f"unknown feature group {name!r}; valid: "
                + ", ".join(g.value for g in CANONICAL_ORDER)
            )
            continue
        if group in groups:
            problems.append(f"feature group {name} listed twice")
        groups.append(group)
    if not names:
        problems.append("features must enable at least one group")
    if problems:
        raise ConfigError(problems)
    return tuple(g for g in CANONICAL_ORDER if g in groups)


def validate(cfg: RunConfig, command: str) -> list[str]:
    """Every validation problem for this command, empty when runnable."""
    problems: list[str] = []
    try:
        groups = parse_feature_groups(cfg.features)
    except ConfigError as exc:
        problems.extend(exc.problems)
        groups = ()

    needs_features = command in ("featurize", "train", "rank", "evaluate", "ablate", "report")
    needs_train = command in ("featurize", "train", "rank", "evaluate", "ablate", "report")
    needs_test = command in ("rank", "evaluate", "ablate", "report")

    if command == "stats" and cfg.train_data is None and cfg.test_data is None:
        problems.append("stats needs train_data or test_data")
    if needs_train and cfg.train_data is None:
        problems.append(f"{command} needs train_data")
    if needs_test and cfg.test_data is None:
        problems.append(f"{command} needs test_data")

    for key in _PATH_KEYS:
        value = getattr(cfg, key)
        if value is not None and not Path(value).exists():
            problems.append(f"{key}: {value} does not exist")
    if cfg.vocab_restriction not in (None, "auto") and not Path(cfg.vocab_restriction).exists():
        problems.append(f"vocab_restriction: {cfg.vocab_restriction} does not exist")

    if cfg.we_policy not in ("all_words", "content_words"):
        problems.append(f"we_policy must be all_words or content_words, got {cfg.we_policy!r}")
    if cfg.ablation_mode not in ABLATION_MODES:
        problems.append(
            f"ablation_mode must be one of {', '.join(ABLATION_MODES)}, got {cfg.ablation_mode!r}"
        )
    if cfg.lam < 0:
        problems.append(f"lam must be >= 0, got {cfg.lam}")
    if cfg.tolerance <= 0:
        problems.append(f"tolerance must be > 0, got {cfg.tolerance}")
    if cfg.max_iterations < 1:
        problems.append(f"max_iterations must be >= 1, got {cfg.max_iterations}")

    if needs_features and groups:
        ablation = command == "ablate"
        active = set(CANONICAL_ORDER) if ablation else set(groups)
        if ablation and set(groups) != set(CANONICAL_ORDER):
            problems.append("ablate needs all seven groups' resources; set features to the full set")
        if (FeatureGroup.WE in active or FeatureGroup.CT in active) and cfg.embeddings is None:
            problems.append("embeddings: required when WE or CT is enabled")
        if FeatureGroup.BERT in active:
            if cfg.scores is None and cfg.score_endpoint is None:
                problems.append("scores or score_endpoint: required when BERT is enabled")
            if cfg.scores is not None and cfg.score_endpoint is not None:
                problems.append("scores and score_endpoint are mutually exclusive")
        if cfg.basic_annotation:
            blocked = sorted(g.value for g in active if g in _GROUPS_NEEDING_POS_TAGS)
            if blocked:
                problems.append(
                    "basic_annotation provides no part-of-speech tags; disable "
                    + ", ".join(blocked)
                    + " or provide CoNLL-U annotations"
                )
        else:
            if needs_train and cfg.train_data is not None and cfg.train_annotations is None:
                problems.append("train_annotations: required unless basic_annotation is true")
            if needs_test and cfg.test_data is not None and cfg.test_annotations is None:
                problems.append("test_annotations: required unless basic_annotation is true")
    return problems


def _transcript_files(path: str) -> list[Path]:
    p = Path(path)
    if p.is_dir():
        files = sorted(p.glob("*.tsv"))
        if not files:
            raise ValueError(f"{path}: directory contains no .tsv transcripts")
        return files
    return [p]


def load_corpus(data: str, gold: str | None, split: str) -> Corpus:
    documents = [load_transcript(f) for f in _transcript_files(data)]
    corpus = build_corpus(documents, split=split)
    if gold is not None:
        default_doc = documents[0].doc_id if len(documents) == 1 else None
        gold_text = Path(gold).read_text(encoding="utf-8")
        corpus = attach_gold_labels(corpus, gold_text, doc_id=default_doc)
    return corpus


def load_annotations(path: str | None, corpus: Corpus, basic: bool) -> AnnotationIndex:
    if basic:
        return basic_annotate(corpus)
    assert path is not None  # guaranteed by validate()
    p = Path(path)
    files = sorted(p.glob("*.conllu")) if p.is_dir() else [p]
    if not files:
        raise ValueError(f"{path}: directory contains no .conllu files")
    sentences = []
    for f in files:
        sentences.extend(parse_conllu(f.read_text(encoding="utf-8")))
    return align_annotations(sentences, corpus)


@dataclass
class LoadedRun:
    """Config plus every resource loaded and cross-checked for one command."""

    cfg: RunConfig
    enabled: tuple[FeatureGroup, ...]
    train_corpus: Corpus | None
    test_corpus: Corpus | None
    train_index: AnnotationIndex | None
    test_index: AnnotationIndex | None
    context: FeatureContext

    @property
    def train_config(self) -> TrainConfig:
        return TrainConfig(
            lam=self.cfg.lam,
            tolerance=self.cfg.tolerance,
            max_iterations=self.cfg.max_iterations,
            seed=self.cfg.seed,
        )

    @property
    def resources(self) -> PipelineResources:
        if self.train_index is None or self.test_index is None:
            raise ValueError("this command needs both train and test annotations")
        return PipelineResources(
            train_index=self.train_index,
            test_index=self.test_index,
            context=self.context,
            train_config=self.train_config,
        )


def _auto_restriction(
    indexes: Sequence[AnnotationIndex], topic_set_words: Sequence[str]
) -> set[str]:
    words: set[str] = set(topic_set_words)
    for index in indexes:
        for sentence in index.values():
            words.update(token.surface for token in sentence.tokens)
    return restriction_for(words)


def load_run(cfg: RunConfig, command: str) -> LoadedRun:
    """Load exactly the resources the command and enabled groups require."""
    enabled = parse_feature_groups(cfg.features)
    if command == "ablate":
        enabled = CANONICAL_ORDER
    needs_features = command != "stats"
    needs_test = command in ("rank", "evaluate", "ablate", "report")

    train_corpus = (
        load_corpus(cfg.train_data, cfg.train_gold, "train") if cfg.train_data else None
    )
    test_corpus = load_corpus(cfg.test_data, cfg.test_gold, "test") if cfg.test_data else None

    if not needs_features:
        return LoadedRun(cfg, enabled, train_corpus, test_corpus, None, None, FeatureContext())

    train_index = (
        load_annotations(cfg.train_annotations, train_corpus, cfg.basic_annotation)
        if train_corpus is not None
        else None
    )
    test_index = (
        load_annotations(cfg.test_annotations, test_corpus, cfg.basic_annotation)
        if test_corpus is not None and (needs_test or cfg.test_annotations or cfg.basic_annotation)
        else None
    )

    topic_set: TopicSet | None = None
    store: EmbeddingStore | None = None
    if FeatureGroup.WE in enabled or FeatureGroup.CT in enabled:
        topics = None
        seed_words: list[str] = []
        if FeatureGroup.CT in enabled:
            topics = load_topics(cfg.topics) if cfg.topics else list(default_topics())
            seed_words = [w for t in topics for w in t.seed_words]
        restrict = None
        if cfg.vocab_restriction == "auto":
            indexes = [i for i in (train_index, test_index) if i is not None]
            restrict = _auto_restriction(indexes, seed_words)
        elif cfg.vocab_restriction is not None:
            restrict = load_vocab_restriction(cfg.vocab_restriction)
        store = load_embeddings_text(cfg.embeddings, restrict=restrict)
        if topics is not None:
            topic_set = build_topic_vectors(topics, store)

    word_list = None
    if FeatureGroup.HW in enabled:
        word_list = load_word_list(cfg.word_list) if cfg.word_list else default_word_list()

    score_map = None
    if FeatureGroup.BERT in enabled:
        if cfg.scores is not None:
            score_map = load_scores_tsv(cfg.scores)
        else:
            sentences = []
            for corpus in (train_corpus, test_corpus):
                if corpus is not None:
                    sentences.extend(
                        (r.doc_id, r.line_no, r.text) for r in corpus.records()
                    )
            score_map = fetch_scores_http(cfg.score_endpoint, sentences)

    context = FeatureContext(
        store=store,
        topic_set=topic_set,
        word_list=word_list,
        score_map=score_map,
        we_policy=cfg.we_policy,
    )
    return LoadedRun(cfg, enabled, train_corpus, test_corpus, train_index, test_index, context)


def _write(out_dir: Path, name: str, content: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    target = out_dir / name
    target.write_text(content, encoding="utf-8")
    return target


def _cmd_stats(run: LoadedRun, out_dir: Path) -> None:
    lines = ["split\tdocuments\tsentences\tpositives"]
    for split, corpus in (("train", run.train_corpus), ("test", run.test_corpus)):
        if corpus is None:
            continue
        if corpus.is_labeled:
            stats = corpus_stats(corpus)
            positives = str(stats.positive_count)
        else:
            positives = "-"
        lines.append(f"{split}\t{len(corpus.documents)}\t{len(corpus)}\t{positives}")
    content = "\n".join(lines) + "\n"
    _write(out_dir, "stats.tsv", content)
    print(content, end="")


def _cmd_featurize(run: LoadedRun, out_dir: Path) -> None:
    wrote = []
    for split, corpus, index in (
        ("train", run.train_corpus, run.train_index),
        ("test", run.test_corpus, run.test_index),
    ):
        if corpus is None or index is None:
            continue
        matrix = assemble_features(corpus, index, run.context, run.enabled)
        wrote.append(_write(out_dir, f"{split}_features.tsv", matrix_to_tsv(matrix)))
    for path in wrote:
        print(f"wrote {path}")


def _cmd_train(run: LoadedRun, out_dir: Path) -> None:
    resources = PipelineResources(
        train_index=run.train_index,
        test_index=run.train_index,
        context=run.context,
        train_config=run.train_config,
    )
    model = train_model(run.train_corpus, resources, run.enabled)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_model(model, out_dir / "model.txt")
    status = "converged" if model.converged else "hit iteration cap"
    print(
        f"wrote {out_dir / 'model.txt'} ({model.width} weights, "
        f"{model.iterations} iterations, {status}, objective {model.objective:.6f})"
    )


def _cmd_rank(run: LoadedRun, out_dir: Path) -> None:
    model_path = out_dir / "model.txt"
    if model_path.exists():
        model = load_model(model_path)
    else:
        model = train_model(run.train_corpus, run.resources, run.enabled)
        out_dir.mkdir(parents=True, exist_ok=True)
        save_model(model, model_path)
    matrix = assemble_features(run.test_corpus, run.test_index, run.context, run.enabled)
    scores = score_matrix(model, matrix)
    lines = ["doc_id\trank\tline_no\tscore\ttext"]
    for doc_id, rows in rank_by_score(matrix.keys, scores).items():
        document = run.test_corpus.document(doc_id)
        for rank, (line_no, score) in enumerate(rows, 1):
            text = document.record(line_no).text
            lines.append(f"{doc_id}\t{rank}\t{line_no}\t{float(score)!r}\t{text}")
    target = _write(out_dir, "ranked.tsv", "\n".join(lines) + "\n")
    print(f"wrote {target}")


def _cmd_evaluate(run: LoadedRun, out_dir: Path) -> None:
    result = run_pipeline(run.train_corpus, run.test_corpus, run.resources, run.enabled)
    _write(out_dir, "evaluation.tsv", report_to_tsv(result.report))
    print(format_report(result.report))


def _cmd_ablate(run: LoadedRun, out_dir: Path) -> None:
    rows = run_ablation(
        run.train_corpus, run.test_corpus, run.resources, run.cfg.ablation_mode
    )
    _write(out_dir, "ablation.tsv", ablation_to_tsv(rows))
    print(format_ablation(rows))


def _cmd_report(run: LoadedRun, out_dir: Path) -> None:
    result = run_pipeline(run.train_corpus, run.test_corpus, run.resources, run.enabled)
    entries = qualitative_report(result.ranked_docs, run.test_corpus)
    _write(out_dir, "qualitative.tsv", qualitative_to_tsv(entries))
    for entry in entries:
        print(f"{entry.doc_id}  rank {entry.rank}  {entry.speaker}: {entry.text}")


_RUNNERS = {
    "stats": _cmd_stats,
    "featurize": _cmd_featurize,
    "train": _cmd_train,
    "rank": _cmd_rank,
    "evaluate": _cmd_evaluate,
    "ablate": _cmd_ablate,
    "report": _cmd_report,
}


def run(command: str, config_path: str | Path, overrides: Mapping[str, object] | None = None) -> int:
    """Execute one command; returns the process exit code (0/1/2)."""
    try:
        cfg = load_config(config_path, overrides)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 1
    problems = validate(cfg, command)
    if problems:
        for problem in problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 1
    try:
        loaded = load_run(cfg, command)
        _RUNNERS[command](loaded, Path(cfg.output_dir))
    except Exception as exc:  # noqa: BLE001 - CLI boundary maps errors to exit 2
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entrypoint(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="checkworthy",
        description="Rank transcript sentences by check-worthiness.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("config", help="path to a YAML run config")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config field (repeatable; value parsed as YAML)",
    )
    parser.add_argument(
        "--mode",
        choices=ABLATION_MODES,
        help="shorthand for --set ablation_mode=... (ablate only)",
    )
    args = parser.parse_args(argv)
    try:
        overrides = _parse_overrides(args.overrides)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 1
    if args.mode is not None:
        overrides["ablation_mode"] = args.mode
    return run(args.command, args.config, overrides)


if __name__ == "__main__":
    sys.exit(entrypoint())
