"""Touch-dynamics continuous authentication toolkit.

Raw two-finger touch logs go in; per-user authentication metrics come out.
The stages are importable on their own:

    ingest      -> parse and clean 8-field event logs
    kinematics  -> per-event speed/acceleration/jerk/angle features
    windowing   -> 10-event gestures aggregated to 44-value vectors
    dataset     -> balanced authentic/imposter pools and splits
    classifiers -> MLP, gradient-boosted trees, kernel SVM
    evaluation  -> confusion matrices, metrics, grouped reports
    synth       -> synthetic behavioural profiles and logs
"""

__version__ = "0.1.0"
