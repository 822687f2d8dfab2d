from typing import Dict, Iterable, List

from twinbeam.harness.models import PredictorKind, SchemeId, SchemeSpec

SCHEMES: Dict[SchemeId, SchemeSpec] = {
    spec.id: spec
    for spec in (
        SchemeSpec(
            id=SchemeId.REACTIVE_ZF,
            title="Reactive ZF",
            predictor=PredictorKind.HOLD,
            regime_aware=False,
            proactive=False,
        ),
        SchemeSpec(
            id=SchemeId.REACTIVE_HYBRID,
            title="Reactive NF/FF hybrid",
            predictor=PredictorKind.HOLD,
            regime_aware=True,
            proactive=False,
        ),
        SchemeSpec(
            id=SchemeId.DT_DETERMINISTIC,
            title="DT deterministic prediction",
            predictor=PredictorKind.DETERMINISTIC,
            regime_aware=True,
            proactive=True,
        ),
        SchemeSpec(
            id=SchemeId.GENAI_REGIME_UNAWARE,
            title="GenAI without regime awareness",
            predictor=PredictorKind.GENERATIVE,
            regime_aware=False,
            proactive=True,
        ),
        SchemeSpec(
            id=SchemeId.PROPOSED,
            title="GenAI regime-aware (proposed)",
            predictor=PredictorKind.GENERATIVE,
            regime_aware=True,
            proactive=True,
        ),
        SchemeSpec(
            id=SchemeId.ORACLE,
            title="Oracle prediction",
            predictor=PredictorKind.ORACLE,
            regime_aware=True,
            proactive=True,
            in_comparison=False,
        ),
    )
}


def get_scheme(scheme) -> SchemeSpec:
    try:
        return SCHEMES[SchemeId(scheme)]
    except ValueError:
        raise ValueError(f"Unknown scheme '{scheme}'; expected one of {[s.value for s in SchemeId]}") from None


def needs_model(schemes: Iterable) -> bool:
    return any(get_scheme(s).predictor == PredictorKind.GENERATIVE for s in schemes)


def figure_schemes(schemes: Iterable, include_oracle: bool = False) -> List[SchemeId]:
    return [SchemeId(s) for s in schemes if include_oracle or get_scheme(s).in_comparison]
