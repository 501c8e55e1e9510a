import pathlib


CURDIR = pathlib.Path(__file__).parent
DIACONIS_S3 = CURDIR / "diaconis-s3.yml"
DIACONIS_S3_VERIFY = CURDIR / "diaconis-s3-verify.yml"
PARITY_K2 = CURDIR / "parity-k2.yml"
PARITY_K3 = CURDIR / "parity-k3.yml"
GENOTYPE = CURDIR / "genotype.yml"
MARTINGALE = CURDIR / "martingale.yml"

ALL_EXPERIMENTS = {
    str(experiment.with_suffix("").name): str(experiment.resolve())
    for experiment in [
        DIACONIS_S3,
        DIACONIS_S3_VERIFY,
        PARITY_K2,
        PARITY_K3,
        GENOTYPE,
        MARTINGALE,
    ]
}
