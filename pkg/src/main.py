import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from hsc.codec.hsc_codec import decode, encode
from hsc.codec.hsc_config import HscEncoderConfig, HscPotentialPlacement
from hsc.codec.hsc_container import (
    HscCompressedMesh,
    HscStreamStats,
    deserialize,
    write_container,
)
from hsc.error import HscException, HscParseError, HscUsageError
from hsc.graph.hsc_partition import DEFAULT_BLOCK_SIZE
from hsc.meshio.hsc_emitter import DEFAULT_PRECISION
from hsc.meshio.hsc_files import (
    atomic_write_bytes,
    read_bytes,
    read_mesh,
    write_mesh,
)
from hsc.meshio.hsc_mesh import HscMesh
from hsc.meshio.hsc_synthetic import SYNTHETIC_PREFIX, synthetic_mesh
from hsc.metrics.hsc_metrics import HscErrorReport, visual_error
from hsc.sweep.hsc_sweep import HscSweepMethod, format_sweep_csv, run_sweep

logger = logging.getLogger("hsc")

EXIT_SUCCESS = 0
EXIT_USAGE = 1


class HscModule:
    """One run of the command line: the input, the intermediate products of
    each stage and the output, in the order the stages fill them in."""

    def __init__(
        self, *, input_file: str, output_file: Optional[str], seed: int
    ):
        # Metadata
        self.input_file = input_file
        self.output_file = output_file
        self.seed = seed

        self.mesh: Optional[HscMesh] = None
        self.compressed: Optional[HscCompressedMesh] = None
        self.stream: bytes = b""
        self.stats: Optional[HscStreamStats] = None
        self.decoded: Optional[HscMesh] = None

    def read_input_mesh(self):
        if self.input_file.startswith(SYNTHETIC_PREFIX):
            self.mesh = synthetic_mesh(self.input_file, self.seed)
        else:
            self.mesh = read_mesh(Path(self.input_file))

    def read_input_stream(self):
        self.stream = read_bytes(Path(self.input_file))

    ############################################################################
    ### ENCODER
    ############################################################################

    def run_encoder(self, config: HscEncoderConfig):
        assert self.mesh is not None
        self.compressed = encode(self.mesh, config)
        self.stream, self.stats = write_container(self.compressed)

    def save_stream(self):
        assert self.stream and self.output_file is not None
        atomic_write_bytes(Path(self.output_file), self.stream)

    ############################################################################
    ### DECODER
    ############################################################################

    def run_decoder(self, workers: int):
        assert self.stream
        self.compressed = deserialize(self.stream)
        self.decoded = decode(self.compressed, workers=workers)

    def save_decoded_mesh(self, precision: int):
        assert self.decoded is not None and self.output_file is not None
        write_mesh(Path(self.output_file), self.decoded, precision)


################################################################################
### ARGUMENTS
################################################################################


class HscArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad arguments; 2 is our I/O failure code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def float_list(text: str) -> Tuple[float, ...]:
    try:
        values = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got '{text}'"
        )
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def method_list(text: str) -> Tuple[HscSweepMethod, ...]:
    try:
        return tuple(HscSweepMethod.parse(x.strip()) for x in text.split(","))
    except HscUsageError as e:
        raise argparse.ArgumentTypeError(str(e))


def add_encoder_arguments(parser: argparse.ArgumentParser, ratio_help: str):
    parser.add_argument(
        "--ratio", type=float_list, default=(0.1,), help=ratio_help
    )
    parser.add_argument(
        "--block-size",
        type=int,
        default=DEFAULT_BLOCK_SIZE,
        help="target vertices per block",
    )
    parser.add_argument(
        "--mu-grid",
        type=float_list,
        default=None,
        help="comma-separated mu values (default: log grid scaled per block)",
    )
    parser.add_argument("--max-subdicts", type=int, default=4)
    parser.add_argument(
        "--coeff-bits", type=int, default=32, help="bits per coefficient"
    )
    parser.add_argument(
        "--placement",
        choices=[p.value for p in HscPotentialPlacement],
        default=HscPotentialPlacement.SIDE_RECORD.value,
        help="how the decoder learns the potential's vertex order",
    )


def build_parser() -> argparse.ArgumentParser:
    # Shared flags go on every command so they may follow the command name.
    common = HscArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("-q", "--quiet", action="store_true")
    common.add_argument(
        "--seed",
        type=int,
        default=0,
        help=f"seed for '{SYNTHETIC_PREFIX}<name>' inputs only",
    )
    common.add_argument("--workers", type=int, default=1)

    parser = HscArgumentParser(
        prog="hsc", description="Hamiltonian spectral mesh-geometry codec."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("encode", help="mesh -> .hsc", parents=[common])
    p.add_argument("input")
    p.add_argument("output")
    add_encoder_arguments(p, "target compression ratio in (0, 1]")

    p = commands.add_parser("decode", help=".hsc -> OFF", parents=[common])
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--precision", type=int, default=DEFAULT_PRECISION)

    p = commands.add_parser(
        "eval", help="visual error between two meshes", parents=[common]
    )
    p.add_argument("original")
    p.add_argument("reconstructed")
    p.add_argument("--per-vertex-csv", default=None)

    p = commands.add_parser(
        "sweep", help="rate-distortion table as CSV", parents=[common]
    )
    p.add_argument("input")
    add_encoder_arguments(p, "comma-separated target ratios")
    p.add_argument(
        "--method",
        type=method_list,
        default=tuple(HscSweepMethod),
        help="comma-separated methods (default: all four)",
    )
    p.add_argument("--csv", required=True)
    p.add_argument(
        "--no-timing", action="store_true", help="write 0 as wall_ms"
    )
    return parser


def configure_logging(verbose: int, quiet: bool):
    if quiet:
        level = logging.ERROR
    elif verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", force=True
    )


def encoder_config(args: argparse.Namespace, ratio: float) -> HscEncoderConfig:
    return HscEncoderConfig(
        target_ratio=ratio,
        block_size=args.block_size,
        mu_grid=args.mu_grid,
        max_subdicts=args.max_subdicts,
        coefficient_bits=args.coeff_bits,
        potential_placement=HscPotentialPlacement(args.placement),
        workers=args.workers,
    )


################################################################################
### COMMANDS
################################################################################


def cmd_encode(args: argparse.Namespace) -> int:
    if len(args.ratio) != 1:
        raise HscUsageError("encode takes exactly one --ratio")
    config = encoder_config(args, args.ratio[0])
    module = HscModule(
        input_file=args.input, output_file=args.output, seed=args.seed
    )
    module.read_input_mesh()
    module.run_encoder(config)
    module.save_stream()

    stats = module.stats
    side_bits = stats.total_bits - stats.payload_bits
    print(f"compression ratio: {module.compressed.compression_ratio():.6f}")
    print(f"payload bits: {stats.payload_bits}")
    print(f"side-information bits: {side_bits}")
    print(json.dumps(stats.to_dict()))
    return EXIT_SUCCESS


def cmd_decode(args: argparse.Namespace) -> int:
    module = HscModule(
        input_file=args.input, output_file=args.output, seed=args.seed
    )
    module.read_input_stream()
    module.run_decoder(args.workers)
    module.save_decoded_mesh(args.precision)
    print(f"decoded {module.decoded.n_vertices} vertices")
    return EXIT_SUCCESS


def per_vertex_csv(report: HscErrorReport) -> str:
    lines = ["vertex_id,error"]
    lines.extend(
        f"{i},{value:.9g}" for i, value in enumerate(report.per_vertex.tolist())
    )
    return "\n".join(lines) + "\n"


def cmd_eval(args: argparse.Namespace) -> int:
    original = HscModule(
        input_file=args.original, output_file=None, seed=args.seed
    )
    original.read_input_mesh()
    reconstructed = HscModule(
        input_file=args.reconstructed, output_file=None, seed=args.seed
    )
    reconstructed.read_input_mesh()
    report = visual_error(original.mesh, reconstructed.mesh)
    print(f"visual error: {report.global_error:.9g}")
    print(f"raw sum: {report.raw_sum:.9g}")
    print(f"rms: {report.rms:.9g}")
    if args.per_vertex_csv is not None:
        atomic_write_bytes(
            Path(args.per_vertex_csv), per_vertex_csv(report).encode("ascii")
        )
    return EXIT_SUCCESS


def cmd_sweep(args: argparse.Namespace) -> int:
    module = HscModule(
        input_file=args.input, output_file=args.csv, seed=args.seed
    )
    module.read_input_mesh()
    ratios: Sequence[float] = args.ratio
    # Validate every ratio before any cell runs.
    configs = [encoder_config(args, ratio) for ratio in ratios]
    rows = run_sweep(
        module.mesh,
        ratios,
        args.method,
        configs[0],
        timing=not args.no_timing,
    )
    atomic_write_bytes(Path(args.csv), format_sweep_csv(rows).encode("ascii"))
    print(f"wrote {len(rows)} rows to '{args.csv}'")
    return EXIT_SUCCESS


COMMANDS = {
    "encode": cmd_encode,
    "decode": cmd_decode,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        return COMMANDS[args.command](args)
    except HscException as e:
        logger.debug("command failed", exc_info=True)
        print(f"hsc: error: {e}", file=sys.stderr)
        if isinstance(e, HscParseError) and e.rendered:
            print(e.rendered, end="", file=sys.stderr)
        return e.exit_code


def cli():
    sys.exit(main())


if __name__ == "__main__":
    cli()
