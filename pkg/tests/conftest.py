import hypothesis

hypothesis.settings.register_profile(
    "simcal", deadline=None, derandomize=True, max_examples=100
)
hypothesis.settings.load_profile("simcal")
