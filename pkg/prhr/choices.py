from django.db import models


class Alternative(models.TextChoices):
    """Direction of the alternative to H0: r_F/r_F0 constant."""

    INCREASING = "increasing", "r_F/r_F0 increasing (H1)"
    DECREASING = "decreasing", "r_F/r_F0 decreasing (H1')"

    @property
    def sign(self) -> int:
        return 1 if self is Alternative.INCREASING else -1


class Method(models.TextChoices):
    UMW = "UMW", "Normalised U-statistic"
    JEL = "JEL", "Jackknife empirical likelihood"
    AJEL = "AJEL", "Adjusted jackknife empirical likelihood"


class ElRule(models.TextChoices):
    """
    How a chi-square(1) empirical-likelihood p-value becomes a directional
    decision.

    - gated: reject iff p <= alpha and sign(u) matches the alternative
    - chi2: reject iff p <= alpha, no sign gate (-2logR > chi2_{1,alpha})
    """

    GATED = "gated", "p-value and sign of u"
    CHI2 = "chi2", "p-value only"


class Scenario(models.TextChoices):
    NULL_GED = "null-ged", "Exponential vs GED(1, theta)"
    FRECHET = "frechet", "Frechet(alpha2) vs Frechet(1)"
    GUMBEL = "gumbel", "Exponential vs Gumbel with scale gamma"
