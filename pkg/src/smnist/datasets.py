"""Dataset generation: every SMNIST variant as a train/test pair.

Series:
  m1 -- 28x28 images, centers drawn from the 22x22 range [4, 26) per axis
  m2 -- 10x10 images, 1x1-pixel dots, centers anywhere
  a1 -- 10x10 images of 'X' glyphs (clipped at borders)
  a2 -- 10x10 images mixing 'X', 'O', '+' and square-outline glyphs

Variants:
  naive         counts uniform, centers i.i.d., pattern centered afterwards
  no-centering  same without the centering step
  disjunct      every image unique across train+test, distinct centers
  hard          legal centers split into disjoint train/test sides first

Series-2-style splits (m2/a1/a2) carry exactly one all-zero image each;
remaining counts are drawn from {1..m}.  Series 1 treats 0 as a regular
label.  Generation is a pure function of the spec: same spec, same bytes.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import idx
from .canvas import (
    GLYPH_KINDS,
    PixelGrid,
    StampKind,
    blank,
    canonical_key,
    center_pattern,
    render,
    render_glyphs,
)
from .sampling import (
    POW102X,
    UNIFORM,
    CountDistribution,
    PixelPartition,
    partition_pixels,
    sample_centers,
    sample_count,
    stream_rng,
)
from .supply import n_choose_k

M1_SIZE = 28
M2_SIZE = 10
M1_CENTER_LO, M1_CENTER_HI = 4, 26  # 22 legal values per axis

# A label with no computable supply is declared exhausted after this many
# consecutive duplicate samples.
MAX_DUPLICATE_RUN = 1000

SERIES = ("m1", "m2", "a1", "a2")
VARIANTS = ("naive", "no-centering", "disjunct", "hard")

MANIFEST_NAME = "manifest.json"
MANIFEST_FORMAT = "smnist-manifest-1"


class GenerationError(ValueError):
    """The requested spec cannot be generated."""


@dataclass(frozen=True)
class DatasetSpec:
    """Complete recipe for one train/test pair."""

    series: str
    variant: str
    stamps: tuple            # one kind = fixed stamp; several = uniform per object
    m: int
    distribution: CountDistribution
    train_count: int = 60000
    test_count: int = 10000
    test_pixels: int | None = None   # hard only: size of the test side
    seed: int = 0

    def __post_init__(self):
        if self.series not in SERIES:
            raise GenerationError(f"unknown series {self.series!r}")
        if self.variant not in VARIANTS:
            raise GenerationError(f"unknown variant {self.variant!r}")
        if not self.stamps:
            raise GenerationError("at least one stamp kind required")
        if not 0 < self.m <= 9:
            raise GenerationError(f"max count m={self.m} outside 1..9 (labels are digits)")
        if self.m != self.distribution.m:
            raise GenerationError(
                f"spec m={self.m} disagrees with distribution m={self.distribution.m}"
            )
        if self.train_count < 0 or self.test_count < 0:
            raise GenerationError("negative split size")
        if self.variant == "hard":
            if self.test_pixels is None:
                raise GenerationError("hard variant needs test_pixels")
            if not 0 < self.test_pixels < len(self.center_positions):
                raise GenerationError(
                    f"test_pixels {self.test_pixels} must be strictly between 0 "
                    f"and {len(self.center_positions)}"
                )
        if self.series == "m1" and self.distribution.low != 0:
            raise GenerationError("series m1 draws counts from {0..m}")
        if self.series != "m1" and self.distribution.kind == UNIFORM and self.distribution.low != 1:
            raise GenerationError("series m2/a1/a2 draw non-zero counts from {1..m}")

    @property
    def image_size(self) -> int:
        return M1_SIZE if self.series == "m1" else M2_SIZE

    @property
    def center_positions(self) -> tuple:
        if self.series == "m1":
            rng_vals = range(M1_CENTER_LO, M1_CENTER_HI)
            return tuple((r, c) for r in rng_vals for c in rng_vals)
        size = M2_SIZE
        return tuple((r, c) for r in range(size) for c in range(size))

    @property
    def glyph_mode(self) -> bool:
        return self.series in ("a1", "a2")

    @property
    def distinct_centers(self) -> bool:
        return self.variant in ("disjunct", "hard")

    @property
    def unique_images(self) -> bool:
        return self.variant in ("disjunct", "hard")

    @property
    def standalone_zero(self) -> bool:
        # series-2-style splits carry exactly one all-zero image each
        return self.series != "m1"


@dataclass
class LabeledSet:
    """Images plus numerosity labels for one split."""

    images: list
    labels: list
    centers: list | None = None      # construction log: stamp centers per image
    glyphs: list | None = None       # glyph kind names per image (a-series)
    histogram: dict = field(init=False)

    def __post_init__(self):
        if len(self.images) != len(self.labels):
            raise ValueError("images and labels differ in length")
        self.histogram = histogram_of(self.labels)

    def __len__(self):
        return len(self.images)


def histogram_of(labels) -> dict:
    counts = {}
    for v in labels:
        counts[v] = counts.get(v, 0) + 1
    return counts


@dataclass
class GeneratedPair:
    """generate_pair output: the two splits plus generation bookkeeping."""

    spec: DatasetSpec
    train: LabeledSet
    test: LabeledSet
    partition: PixelPartition | None
    exhausted: dict      # side -> sorted list of exhausted labels

    def __iter__(self):
        return iter((self.train, self.test))


class _LabelState:
    __slots__ = ("count", "supply", "dup_run", "exhausted")

    def __init__(self, supply):
        self.count = 0
        self.supply = supply      # exact combinatorial supply, or None
        self.dup_run = 0
        self.exhausted = False


def _label_states(support, positions, computable: bool) -> dict:
    states = {}
    for n in support:
        supply = None
        if computable:
            supply = n_choose_k(len(positions), n) if n <= len(positions) else 0
        st = _LabelState(supply)
        st.exhausted = supply == 0 and n > 0
        states[n] = st
    return states


def _schedule(train_count: int, test_count: int):
    """Proportionally interleaved split assignment, train-first on ties.

    Disjunct pairs share one uniqueness pool; interleaving lets both splits
    claim shares of labels whose supply runs out.
    """
    total = train_count + test_count
    out = []
    taken = 0
    for i in range(total):
        want = ((i + 1) * test_count) // total
        if want > taken:
            out.append("test")
            taken = want
        else:
            out.append("train")
    return out


def generate_pair(spec: DatasetSpec) -> GeneratedPair:
    """Build the train/test pair described by spec."""
    size = spec.image_size
    universe = spec.center_positions

    partition = None
    if spec.variant == "hard":
        partition = partition_pixels(universe, spec.test_pixels, stream_rng(spec.seed, 0))
        allowed = {"train": partition.train_side, "test": partition.test_side}
    else:
        allowed = {"train": universe, "test": universe}

    rngs = {"train": stream_rng(spec.seed, 1), "test": stream_rng(spec.seed, 2)}
    test_dist = CountDistribution(
        UNIFORM, spec.m, uniform_mix=0.0, low=spec.distribution.low
    )
    dists = {"train": spec.distribution, "test": test_dist}

    # Uniqueness scope: disjunct shares one registry and one supply pool
    # across splits; hard keeps one per side.  Supply is exact (C(P, n))
    # whenever identity is decided by the center set alone: single-pixel
    # dots and glyph anchors.  3x3 dots can merge, so their pixel-level
    # supply is unknown and exhaustion falls back to the duplicate-run rule.
    computable = spec.stamps[0] != StampKind.DOT3
    states = {}
    registries = {}
    if spec.unique_images:
        support = range(0, spec.m + 1) if spec.series == "m1" else range(1, spec.m + 1)
        if spec.variant == "disjunct":
            shared_states = _label_states(support, universe, computable)
            shared_registry = set()
            for side in ("train", "test"):
                states[side] = shared_states
                registries[side] = shared_registry
        else:
            for side in ("train", "test"):
                states[side] = _label_states(support, allowed[side], computable)
                registries[side] = set()

    out = {
        side: {"images": [], "labels": [], "centers": [], "glyphs": []}
        for side in ("train", "test")
    }

    counts = {"train": spec.train_count, "test": spec.test_count}
    if spec.standalone_zero:
        zero = blank(size, size)
        for side in ("train", "test"):
            if counts[side] > 0:
                _commit(out[side], zero, 0, [], [])
                counts[side] -= 1

    for side in _schedule(counts["train"], counts["test"]):
        _generate_one(spec, side, out[side], allowed[side], dists[side],
                      rngs[side], states.get(side), registries.get(side), size)

    exhausted = {
        side: sorted(n for n, st in states.get(side, {}).items() if st.exhausted)
        for side in ("train", "test")
    }
    return GeneratedPair(
        spec=spec,
        train=_labeled(out["train"], spec),
        test=_labeled(out["test"], spec),
        partition=partition,
        exhausted=exhausted,
    )


def _commit(side_out, grid, label, centers, glyphs):
    side_out["images"].append(grid)
    side_out["labels"].append(label)
    side_out["centers"].append(list(centers))
    side_out["glyphs"].append(list(glyphs))


def _labeled(side_out, spec) -> LabeledSet:
    return LabeledSet(
        images=side_out["images"],
        labels=side_out["labels"],
        centers=side_out["centers"],
        glyphs=side_out["glyphs"] if spec.glyph_mode else None,
    )


def _generate_one(spec, side, side_out, allowed, dist, rng, states, registry, size):
    while True:
        n = sample_count(dist, rng)
        if states is None:
            grid, centers, glyphs = _draw_image(spec, n, allowed, rng, size)
            _commit(side_out, grid, n, centers, glyphs)
            return

        st = states.get(n)
        if st is None or st.exhausted:
            if all(s.exhausted for s in states.values()):
                detail = ", ".join(
                    f"{k}: {s.count}/{s.supply if s.supply is not None else '?'}"
                    for k, s in sorted(states.items())
                )
                raise GenerationError(
                    f"cannot fill {side} split: every label is exhausted "
                    f"(label {n} requested; committed/supply per label: {detail})"
                )
            continue

        if n == 0:
            # the all-zero image is exempt from uniqueness; under disjunct
            # its count additionally trails the 1-dot count, keeping the
            # two balanced
            if spec.variant == "disjunct":
                one = states.get(1)
                if one is not None and st.count > one.count:
                    if one.exhausted:
                        st.exhausted = True
                    continue
            _commit(side_out, blank(size, size), 0, [], [])
            st.count += 1
            return

        grid, centers, glyphs = _attempt_unique(
            spec, n, st, allowed, rng, registry, size
        )
        if grid is None:
            continue  # label just exhausted; redraw
        _commit(side_out, grid, n, centers, glyphs)
        return


def _attempt_unique(spec, n, st, allowed, rng, registry, size):
    while True:
        grid, centers, glyphs = _draw_image(spec, n, allowed, rng, size)
        key = tuple(sorted(centers)) if spec.glyph_mode else canonical_key(grid)
        if key not in registry:
            registry.add(key)
            st.count += 1
            st.dup_run = 0
            if st.supply is not None and st.count == st.supply:
                st.exhausted = True
            return grid, centers, glyphs
        st.dup_run += 1
        if st.supply is None and st.dup_run >= MAX_DUPLICATE_RUN:
            st.exhausted = True
            return None, None, None
        # with exact supply known, a free combination provably remains;
        # keep sampling


def _draw_image(spec, n, allowed, rng, size):
    centers = sample_centers(n, allowed, spec.distinct_centers, rng)
    glyphs = []
    if spec.glyph_mode:
        if spec.series == "a1":
            glyphs = [StampKind.GLYPH_X] * n
        else:
            glyphs = [GLYPH_KINDS[i] for i in rng.integers(0, len(GLYPH_KINDS), size=n)]
        grid = render_glyphs(size, size, centers, glyphs)
    else:
        if spec.variant == "naive" and centers:
            centers = center_pattern(centers, size, size, spec.stamps[0])
        grid = render(size, size, centers, spec.stamps[0], clip=False)
    return grid, centers, glyphs


# ---------------------------------------------------------------------------
# dataset directories: four IDX files plus a manifest


def _image_set(split: LabeledSet, size: int) -> idx.IdxImageSet:
    return idx.IdxImageSet(
        count=len(split),
        rows=size,
        cols=size,
        pixels=b"".join(g.data for g in split.images),
    )


def _label_set(split: LabeledSet) -> idx.IdxLabelSet:
    return idx.IdxLabelSet(count=len(split), labels=bytes(split.labels))


def write_dataset(pair: GeneratedPair, outdir, gzip: bool = False) -> Path:
    """Write train/test IDX files and the sidecar manifest into outdir."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    size = pair.spec.image_size
    suffix = ".gz" if gzip else ""
    idx.save_images(outdir / (idx.TRAIN_IMAGES_NAME + suffix), _image_set(pair.train, size))
    idx.save_labels(outdir / (idx.TRAIN_LABELS_NAME + suffix), _label_set(pair.train))
    idx.save_images(outdir / (idx.TEST_IMAGES_NAME + suffix), _image_set(pair.test, size))
    idx.save_labels(outdir / (idx.TEST_LABELS_NAME + suffix), _label_set(pair.test))
    manifest_path = outdir / MANIFEST_NAME
    manifest_path.write_text(json.dumps(build_manifest(pair)))
    return outdir


def build_manifest(pair: GeneratedPair) -> dict:
    spec = pair.spec
    manifest = {
        "format": MANIFEST_FORMAT,
        "series": spec.series,
        "variant": spec.variant,
        "stamps": [s.value for s in spec.stamps],
        "m": spec.m,
        "distribution": {
            "kind": spec.distribution.kind,
            "m": spec.distribution.m,
            "uniform_mix": spec.distribution.uniform_mix,
            "low": spec.distribution.low,
        },
        "train_count": spec.train_count,
        "test_count": spec.test_count,
        "test_pixels": spec.test_pixels,
        "seed": spec.seed,
        "image_size": spec.image_size,
        "histograms": {
            "train": {str(k): v for k, v in sorted(pair.train.histogram.items())},
            "test": {str(k): v for k, v in sorted(pair.test.histogram.items())},
        },
        "exhausted": pair.exhausted,
        "construction": {
            "train": _construction(pair.train),
            "test": _construction(pair.test),
        },
    }
    if pair.partition is not None:
        manifest["partition"] = {
            "train": [list(p) for p in pair.partition.train_side],
            "test": [list(p) for p in pair.partition.test_side],
        }
    return manifest


def _construction(split: LabeledSet) -> dict:
    entry = {"centers": [[list(c) for c in cs] for cs in split.centers]}
    if split.glyphs is not None:
        entry["glyphs"] = [[g.value for g in gs] for gs in split.glyphs]
    return entry


def spec_from_manifest(manifest: dict) -> DatasetSpec:
    d = manifest["distribution"]
    return DatasetSpec(
        series=manifest["series"],
        variant=manifest["variant"],
        stamps=tuple(StampKind(s) for s in manifest["stamps"]),
        m=manifest["m"],
        distribution=CountDistribution(d["kind"], d["m"], d["uniform_mix"], d["low"]),
        train_count=manifest["train_count"],
        test_count=manifest["test_count"],
        test_pixels=manifest["test_pixels"],
        seed=manifest["seed"],
    )


def _find(outdir: Path, name: str) -> Path:
    plain, gz = outdir / name, outdir / (name + ".gz")
    if plain.exists():
        return plain
    if gz.exists():
        return gz
    raise FileNotFoundError(f"{name}[.gz] not found in {outdir}")


def load_dataset(outdir) -> GeneratedPair:
    """Rebuild a GeneratedPair from a written dataset directory."""
    outdir = Path(outdir)
    manifest = json.loads((outdir / MANIFEST_NAME).read_text())
    if manifest.get("format") != MANIFEST_FORMAT:
        raise ValueError(f"unrecognized manifest format in {outdir}")
    spec = spec_from_manifest(manifest)

    splits = {}
    for side, img_name, lbl_name in (
        ("train", idx.TRAIN_IMAGES_NAME, idx.TRAIN_LABELS_NAME),
        ("test", idx.TEST_IMAGES_NAME, idx.TEST_LABELS_NAME),
    ):
        images = idx.load_images(_find(outdir, img_name))
        labels = idx.load_labels(_find(outdir, lbl_name))
        if images.count != labels.count:
            raise ValueError(f"{side}: image/label counts differ in {outdir}")
        grids = [
            PixelGrid(images.cols, images.rows, images.image(i))
            for i in range(images.count)
        ]
        cons = manifest["construction"][side]
        centers = [[tuple(c) for c in cs] for cs in cons["centers"]]
        glyphs = None
        if "glyphs" in cons:
            glyphs = [[StampKind(g) for g in gs] for gs in cons["glyphs"]]
        splits[side] = LabeledSet(
            images=grids, labels=list(labels.labels), centers=centers, glyphs=glyphs
        )

    partition = None
    if "partition" in manifest:
        train = tuple(tuple(p) for p in manifest["partition"]["train"])
        test = tuple(tuple(p) for p in manifest["partition"]["test"])
        partition = PixelPartition(
            universe=tuple(sorted(train + test)), train_side=train, test_side=test
        )
    return GeneratedPair(
        spec=spec,
        train=splits["train"],
        test=splits["test"],
        partition=partition,
        exhausted={k: list(v) for k, v in manifest["exhausted"].items()},
    )


# ---------------------------------------------------------------------------
# named configurations


def _uniform(m, low):
    return CountDistribution(UNIFORM, m, uniform_mix=0.0, low=low)


def _pow(m):
    return CountDistribution(POW102X, m, uniform_mix=0.1, low=1)


_PRESETS = {
    # series 1: 28x28, ten labels, 3x3 dots unless named 1px
    "m1-naive": dict(series="m1", variant="naive", stamps=(StampKind.DOT3,),
                     m=9, distribution=_uniform(9, 0)),
    "m1-no-centering": dict(series="m1", variant="no-centering", stamps=(StampKind.DOT3,),
                            m=9, distribution=_uniform(9, 0)),
    "m1-disjunct": dict(series="m1", variant="disjunct", stamps=(StampKind.DOT3,),
                        m=9, distribution=_uniform(9, 0)),
    "m1-disjunct-1px": dict(series="m1", variant="disjunct", stamps=(StampKind.DOT1,),
                            m=9, distribution=_uniform(9, 0)),
    "m1-hard": dict(series="m1", variant="hard", stamps=(StampKind.DOT3,),
                    m=9, distribution=_uniform(9, 0), test_pixels=59),
    "m1-hard-1px": dict(series="m1", variant="hard", stamps=(StampKind.DOT1,),
                        m=9, distribution=_uniform(9, 0), test_pixels=59),
    # series 2: 10x10, single-pixel dots, one standalone zero image per split
    "m2-disjunct": dict(series="m2", variant="disjunct", stamps=(StampKind.DOT1,),
                        m=9, distribution=_uniform(9, 1)),
    "m2-hard": dict(series="m2", variant="hard", stamps=(StampKind.DOT1,),
                    m=9, distribution=_uniform(9, 1), test_pixels=16),
    "m2-disjunct-102x": dict(series="m2", variant="disjunct", stamps=(StampKind.DOT1,),
                             m=9, distribution=_pow(9)),
    "m2-hard-102x": dict(series="m2", variant="hard", stamps=(StampKind.DOT1,),
                         m=9, distribution=_pow(9), test_pixels=16),
    # glyph datasets
    "a1-hard-102x": dict(series="a1", variant="hard", stamps=(StampKind.GLYPH_X,),
                         m=9, distribution=_pow(9), test_pixels=16),
    "a2-hard-102x": dict(series="a2", variant="hard", stamps=GLYPH_KINDS,
                         m=9, distribution=_pow(9), test_pixels=16),
    # the tail-heavy hard family split out by maximum count
    "m2-4h-102x": dict(series="m2", variant="hard", stamps=(StampKind.DOT1,),
                       m=4, distribution=_pow(4), test_pixels=28),
    "m2-5h-102x": dict(series="m2", variant="hard", stamps=(StampKind.DOT1,),
                       m=5, distribution=_pow(5), test_pixels=28),
    "m2-6h-102x": dict(series="m2", variant="hard", stamps=(StampKind.DOT1,),
                       m=6, distribution=_pow(6), test_pixels=28),
    "m2-7h-102x": dict(series="m2", variant="hard", stamps=(StampKind.DOT1,),
                       m=7, distribution=_pow(7), test_pixels=28),
    "m2-8h-102x": dict(series="m2", variant="hard", stamps=(StampKind.DOT1,),
                       m=8, distribution=_pow(8), test_pixels=28),
    # small-count glyph experiment: 30k train, 57/43 split
    "a2-h3-102x": dict(series="a2", variant="hard", stamps=GLYPH_KINDS,
                       m=3, distribution=_pow(3), test_pixels=43, train_count=30000),
}

# the twelve core configurations exercised by structural validation
CATALOG = (
    "m1-naive", "m1-no-centering", "m1-disjunct", "m1-disjunct-1px",
    "m1-hard", "m1-hard-1px",
    "m2-disjunct", "m2-hard", "m2-disjunct-102x", "m2-hard-102x",
    "a1-hard-102x", "a2-hard-102x",
)

PRESET_NAMES = tuple(_PRESETS)


def preset(name: str, seed: int = 0, **overrides) -> DatasetSpec:
    """A named catalog configuration, optionally overriding counts or seed."""
    if name not in _PRESETS:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(_PRESETS)}")
    kw = dict(_PRESETS[name])
    kw.update(overrides)
    return DatasetSpec(seed=seed, **kw)
