# Essay grading on a numbered Gemini release with instruction, bounds, and
# temperature all present. Planted: zero findings. (Gemini has no retry
# parameter, so the retry check does not apply.)

import google.generativeai as genai

model = genai.GenerativeModel(
    "gemini-1.5-pro-002",
    system_instruction="You grade essays fairly and concisely.",
)


def grade(essay):
    response = model.generate_content(
        essay,
        generation_config={"temperature": 0.1, "max_output_tokens": 512},
        request_options={"timeout": 30},
    )
    return response.text
