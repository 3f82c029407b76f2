"""Model and game builders shared by the test modules."""

import numpy as np

from model import GDistribution, GaussianMixture, IndexModel, ModelSpec, PointMassMixture, SignInfo
from numerics import Grid1D


def normal_g(dimension: int = 1, w: str = "0") -> GDistribution:
    return GDistribution(
        dimension=dimension,
        by_w={w: GaussianMixture(means=[[0.0] * dimension], scales=[[1.0] * dimension], probs=[1.0])},
    )


def point_mass_g(atoms, probs, w: str = "0") -> GDistribution:
    atoms = [list(np.atleast_1d(a).astype(float)) for a in atoms]
    return GDistribution(dimension=len(atoms[0]), by_w={w: PointMassMixture(atoms=atoms, probs=list(probs))})


def binary_spec(beta0: float = 0.0, beta1: float = 1.0, g: GDistribution = None, z1=(-1.0, 1.0, 65),
                z2_values=(1.0,), sign: SignInfo = None) -> ModelSpec:
    return ModelSpec(
        family="binary",
        n_goods=1,
        index=IndexModel.single(beta0, beta1, sign),
        g=g or normal_g(),
        z1_grid=Grid1D(lo=z1[0], hi=z1[1], n=z1[2]),
        z2_points=[[float(z)] for z in z2_values],
    )


def z2_line(lo: float, hi: float, n: int):
    return list(np.linspace(lo, hi, n))




def multinomial_spec(beta0: float = 0.0, beta1: float = 1.0, g: GDistribution = None, z1=(-2.0, 2.0, 65),
                     z2_points=((1.0, 1.0),), orientation: int = 1) -> ModelSpec:
    return ModelSpec(
        family="multinomial",
        n_goods=2,
        index=IndexModel.single(beta0, beta1),
        g=g or normal_g(2),
        z1_grid=Grid1D(lo=z1[0], hi=z1[1], n=z1[2]),
        z2_points=[list(p) for p in z2_points],
        orientation=orientation,
    )


def bundle_spec(g: GDistribution, beta0: float = 0.0, beta1: float = 1.0, z1=(-1.0, 1.0, 9),
                z2_points=((1.0, 1.0),)) -> ModelSpec:
    return ModelSpec(
        family="bundles",
        n_goods=2,
        index=IndexModel.single(beta0, beta1),
        g=g,
        z1_grid=Grid1D(lo=z1[0], hi=z1[1], n=z1[2]),
        z2_points=[list(p) for p in z2_points],
    )
